//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, Rational};
use super::vars::{same_table, Block, Var, VarTable};
use crate::error::{Error, Result};

/// Dense exponent vector keyed by the table order.
///
/// The derived ordering compares total degree first and then exponents
/// lexicographically, i.e. graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial { deg: 0, exps: vec![0; nvars] }
    }

    pub fn new(exps: Vec<u16>) -> Monomial {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { deg, exps }
    }

    pub fn var(nvars: usize, v: Var) -> Monomial {
        let mut exps = vec![0; nvars];
        exps[v.0] = 1;
        Monomial { deg: 1, exps }
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.0]
    }

    pub fn degree_in(&self, vars: &[Var]) -> u32 {
        vars.iter().map(|v| self.exps[v.0] as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { deg: self.deg + other.deg, exps }
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { deg: self.deg - other.deg, exps })
    }

    pub fn with_exp(&self, v: Var, e: u16) -> Monomial {
        let mut exps = self.exps.clone();
        exps[v.0] = e;
        Monomial::new(exps)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Product of falling factorials `e!/(e-a)!`, the scalar produced by
    /// `d^alpha x^e`. Assumes `alpha` divides `self`.
    pub fn falling_factorial(&self, alpha: &Monomial) -> BigInt {
        let mut acc = BigInt::one();
        for (&e, &a) in self.exps.iter().zip(&alpha.exps) {
            for j in 0..a {
                acc *= BigInt::from(e - j);
            }
        }
        acc
    }

    /// Product of binomial coefficients `C(self_i, other_i)`.
    pub fn binomial(&self, other: &Monomial) -> BigInt {
        let mut acc = BigInt::one();
        for (&a, &g) in self.exps.iter().zip(&other.exps) {
            let (mut num, mut den) = (BigInt::one(), BigInt::one());
            for j in 0..g {
                num *= BigInt::from(a - j);
                den *= BigInt::from(j + 1);
            }
            acc *= num / den;
        }
        acc
    }

    /// All exponent vectors `beta <= self`.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.exps.len())];
        for &e in &self.exps {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for j in 0..=e {
                    let mut v: Vec<u16> = prefix.clone();
                    v.push(j);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Monomial::new).collect()
    }

    /// Exponent vectors of total degree `deg` supported on `vars`.
    pub fn all_of_degree(nvars: usize, vars: &[Var], deg: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u16; nvars];
        fn rec(vars: &[Var], left: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            match vars.split_first() {
                None => {
                    if left == 0 {
                        out.push(Monomial::new(exps.clone()));
                    }
                }
                Some((&v, rest)) => {
                    if rest.is_empty() {
                        exps[v.0] = left as u16;
                        out.push(Monomial::new(exps.clone()));
                        exps[v.0] = 0;
                        return;
                    }
                    for e in (0..=left).rev() {
                        exps[v.0] = e as u16;
                        rec(rest, left - e, exps, out);
                    }
                    exps[v.0] = 0;
                }
            }
        }
        if vars.is_empty() {
            if deg == 0 {
                out.push(Monomial::one(nvars));
            }
            return out;
        }
        rec(vars, deg, &mut exps, &mut out);
        out.sort();
        out
    }

    /// Exponent vectors of total degree at most `deg` supported on `vars`.
    pub fn all_up_to_degree(nvars: usize, vars: &[Var], deg: u32) -> Vec<Monomial> {
        (0..=deg)
            .flat_map(|d| Monomial::all_of_degree(nvars, vars, d))
            .collect()
    }
}

/// A polynomial over a [`VarTable`]. Zero coefficients are never stored, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug)]
pub struct Poly {
    table: Arc<VarTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(table: &Arc<VarTable>) -> Poly {
        Poly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(table: &Arc<VarTable>, c: Rational) -> Poly {
        Poly::term(table, Monomial::one(table.len()), c)
    }

    pub fn one(table: &Arc<VarTable>) -> Poly {
        Poly::constant(table, Rational::one())
    }

    pub fn var(table: &Arc<VarTable>, v: Var) -> Poly {
        Poly::term(table, Monomial::var(table.len(), v), Rational::one())
    }

    pub fn term(table: &Arc<VarTable>, m: Monomial, c: Rational) -> Poly {
        debug_assert_eq!(m.exps.len(), table.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { table: table.clone(), terms }
    }

    pub fn from_terms<I>(table: &Arc<VarTable>, terms: I) -> Poly
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Poly::zero(table);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_table(&self, other: &Poly) -> Result<()> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch(self.table.to_string(), other.table.to_string()))
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Poly { table: self.table.clone(), terms: acc })
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        assert!(same_table(&self.table, &other.table), "table mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        assert!(same_table(&self.table, &other.table), "table mismatch");
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table);
        }
        Poly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table);
        }
        Poly {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(k, d)| (k.mul(m), d * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.table);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> Poly {
        let mut out = Poly::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m.exps[v.0];
            if e == 0 {
                continue;
            }
            let dm = m.with_exp(v, e - 1);
            out.add_term(dm, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Checked partial derivative: fails if `v` is outside the table.
    pub fn checked_diff(&self, v: Var) -> Result<Poly> {
        if v.0 >= self.table.len() {
            return Err(Error::UnknownVariable(format!("#{}", v.0)));
        }
        Ok(self.diff(v))
    }

    /// Iterated partial derivative `d^alpha`.
    pub fn diff_multi(&self, alpha: &Monomial) -> Poly {
        if alpha.deg == 0 {
            return self.clone();
        }
        let mut out = Poly::zero(&self.table);
        for (m, c) in &self.terms {
            if let Some(q) = m.checked_div(alpha) {
                let f = m.falling_factorial(alpha);
                out.add_term(q, c * Rational::from_integer(f));
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg).max()
    }

    pub fn max_degree_in(&self, vars: &[Var]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(vars)).max().unwrap_or(0)
    }

    /// True if every term has degree exactly `d` in `vars` (vacuous for zero).
    pub fn is_homogeneous_in(&self, vars: &[Var], d: u32) -> bool {
        self.terms.keys().all(|m| m.degree_in(vars) == d)
    }

    pub fn check_homogeneous(&self, block: Block, d: u32) -> Result<()> {
        let vars = self.table.block_vars(block);
        if self.is_homogeneous_in(&vars, d) {
            Ok(())
        } else {
            Err(Error::NotHomogeneous { block: block.prefix(), expected: d })
        }
    }

    /// First fiber variable occurring in the polynomial, if any.
    pub fn first_fiber_var(&self) -> Option<Var> {
        let base = self.table.block_len();
        self.terms
            .keys()
            .flat_map(|m| m.exps.iter().enumerate().skip(base).filter(|(_, &e)| e > 0))
            .map(|(i, _)| Var(i))
            .min()
    }

    /// Re-expresses the polynomial over a table that contains all of its
    /// variables (same `n`, superset of blocks).
    pub fn lift(&self, target: &Arc<VarTable>) -> Result<Poly> {
        if same_table(&self.table, target) {
            return Ok(self.clone());
        }
        let map = self.table.embedding_into(target)?;
        Ok(self.remap(target, &map))
    }

    /// Restricts to a smaller table; fails if a dropped variable occurs.
    pub fn restrict(&self, target: &Arc<VarTable>) -> Result<Poly> {
        if same_table(&self.table, target) {
            return Ok(self.clone());
        }
        let map = target.embedding_into(&self.table)?;
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let kept: u32 = map.iter().map(|&i| m.exps[i] as u32).sum();
            if kept != m.deg {
                let v = (0..m.exps.len()).find(|&i| m.exps[i] > 0 && !map.contains(&i));
                let name = v.map(|i| self.table.name(Var(i))).unwrap_or_default();
                return Err(Error::FiberVariable(name));
            }
            let exps = map.iter().map(|&i| m.exps[i]).collect();
            out.add_term(Monomial::new(exps), c.clone());
        }
        Ok(out)
    }

    fn remap(&self, target: &Arc<VarTable>, map: &[usize]) -> Poly {
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; target.len()];
            for (i, &e) in m.exps.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }

    /// Substitutes `var -> value` for each pair (simultaneously), evaluating
    /// to a polynomial in the remaining variables.
    pub fn substitute(&self, values: &[(Var, Poly)]) -> Poly {
        let mut out = Poly::zero(&self.table);
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let mut factor = Poly::constant(&self.table, c.clone());
            for (v, val) in values {
                let e = m.exps[v.0];
                if e > 0 {
                    rest = rest.with_exp(*v, 0);
                    factor = &factor * &val.pow(e as u32);
                }
            }
            out.add_assign_ref(&factor.mul_monomial(&rest, &Rational::one()));
        }
        out
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = self.table.name(Var(i));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    /// Terms in descending graded-lex order, e.g. `1/2*p1*xi_q1 - xi_t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = self.monomial_string(m);
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("table mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("table mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("table mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Binary operations of the polynomial interchange layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &Poly, b: &Poly, op: PolyOp) -> Result<Poly> {
    match op {
        PolyOp::Add => a.checked_add(b),
        PolyOp::Sub => a.checked_sub(b),
        PolyOp::Mul => a.checked_mul(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::algebra::vars::Coord;

    fn base1() -> Arc<VarTable> {
        VarTable::base(1)
    }

    #[test]
    fn difference_of_squares() {
        let t = base1();
        let x = Poly::var(&t, t.p(1));
        let one = Poly::one(&t);
        let lhs = &(&x + &one) * &(&x - &one);
        let rhs = &(&x * &x) - &one;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn additive_identity_and_scalars() {
        let t = base1();
        let pq = &Poly::var(&t, t.p(1)) * &Poly::var(&t, t.q(1));
        assert_eq!(&pq + &Poly::zero(&t), pq);
        let a = Poly::var(&t, t.p(1)).scale(&rat(1, 2));
        let b = Poly::var(&t, t.p(1)).scale(&rat(1, 3));
        let prod = &a * &b;
        assert_eq!(prod.len(), 1);
        let (m, c) = prod.terms().next().unwrap();
        assert_eq!(m.exp(t.p(1)), 2);
        assert_eq!(*c, rat(1, 6));
    }

    #[test]
    fn derivatives() {
        let t = VarTable::with_xi(1);
        let p = Poly::var(&t, t.p(1));
        let q = Poly::var(&t, t.q(1));
        let f = &(&p * &p) * &q;
        assert_eq!(f.diff(t.p(1)), (&p * &q).scale(&int(2)));
        assert!(p.diff(t.t()).is_zero());
        let xt = Poly::var(&t, t.fv(Block::Xi, Coord::T));
        assert_eq!((&xt * &xt).diff(t.fv(Block::Xi, Coord::T)), xt.scale(&int(2)));
        assert!(p.checked_diff(Var(99)).is_err());
    }

    #[test]
    fn mismatched_tables_error() {
        let a = Poly::one(&VarTable::base(1));
        let b = Poly::one(&VarTable::base(2));
        assert!(poly_arith(&a, &b, PolyOp::Add).is_err());
        assert!(poly_arith(&a, &b, PolyOp::Mul).is_err());
        assert!(poly_arith(&a, &a, PolyOp::Sub).unwrap().is_zero());
    }

    #[test]
    fn display_is_descending_grlex() {
        let t = VarTable::with_xi(1);
        let p = Poly::var(&t, t.p(1));
        let xt = Poly::var(&t, t.fv(Block::Xi, Coord::T));
        let f = &(&p * &xt).scale(&rat(1, 2)) - &Poly::one(&t);
        assert_eq!(f.to_string(), "1/2*p1*xi_t - 1");
        assert_eq!(Poly::zero(&t).to_string(), "0");
    }

    #[test]
    fn multi_derivative_matches_iterated() {
        let t = base1();
        let p = Poly::var(&t, t.p(1));
        let tt = Poly::var(&t, t.t());
        let f = &p.pow(3) * &tt.pow(2);
        let alpha = Monomial::new(vec![2, 0, 1]);
        assert_eq!(f.diff_multi(&alpha), f.diff(t.p(1)).diff(t.p(1)).diff(t.t()));
    }

    #[test]
    fn lift_and_restrict() {
        let base = VarTable::base(1);
        let full = VarTable::full(1);
        let p = Poly::var(&base, base.p(1));
        let lifted = p.lift(&full).unwrap();
        assert_eq!(lifted, Poly::var(&full, full.p(1)));
        assert_eq!(lifted.restrict(&base).unwrap(), p);
        let y = Poly::var(&full, full.fv(Block::Y, Coord::T));
        assert!(y.restrict(&base).is_err());
    }

    #[test]
    fn monomial_enumeration_counts() {
        let t = VarTable::with_xi(1);
        let xi = t.block_vars(Block::Xi);
        assert_eq!(Monomial::all_of_degree(t.len(), &xi, 2).len(), 6);
        let base: Vec<Var> = (0..3).map(Var).collect();
        assert_eq!(Monomial::all_up_to_degree(t.len(), &base, 4).len(), 35);
        assert_eq!(Monomial::all_of_degree(t.len(), &[], 0).len(), 1);
    }

    #[test]
    fn binomial_and_falling_factorial() {
        let a = Monomial::new(vec![4, 2]);
        let g = Monomial::new(vec![2, 1]);
        assert_eq!(a.binomial(&g), BigInt::from(12));
        assert_eq!(a.falling_factorial(&g), BigInt::from(24));
        assert_eq!(a.divisors().len(), 15);
    }
}
