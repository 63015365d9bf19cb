//! Normal-ordered differential operators with polynomial coefficients.
//!
//! An operator is stored as `sum_alpha c_alpha(x) d^alpha`, coefficients to
//! the left of all derivatives. Because the monomials `x^m d^alpha` form a
//! basis of the Weyl algebra, this representation is unique.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::rational::{fmt_rational, Rational};
use super::vars::{same_table, Var, VarTable};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DiffOp {
    table: Arc<VarTable>,
    terms: BTreeMap<Monomial, Poly>,
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for DiffOp {}

impl DiffOp {
    pub fn zero(table: &Arc<VarTable>) -> DiffOp {
        DiffOp { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn identity(table: &Arc<VarTable>) -> DiffOp {
        DiffOp::scalar(table, Rational::one())
    }

    pub fn scalar(table: &Arc<VarTable>, c: Rational) -> DiffOp {
        DiffOp::multiplication(&Poly::constant(table, c))
    }

    /// The zeroth-order operator `f -> p f`.
    pub fn multiplication(p: &Poly) -> DiffOp {
        DiffOp::term(p.clone(), Monomial::one(p.table().len()))
    }

    /// `d/dv`.
    pub fn partial(table: &Arc<VarTable>, v: Var) -> DiffOp {
        DiffOp::term(Poly::one(table), Monomial::var(table.len(), v))
    }

    /// `coeff * d/dv`.
    pub fn vector(coeff: Poly, v: Var) -> DiffOp {
        let n = coeff.table().len();
        DiffOp::term(coeff, Monomial::var(n, v))
    }

    pub fn term(coeff: Poly, alpha: Monomial) -> DiffOp {
        let mut op = DiffOp::zero(coeff.table());
        op.add_term(alpha, &coeff);
        op
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(alpha, coefficient)` pairs in graded-lex order of `alpha`.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &Monomial) -> Poly {
        self.terms.get(alpha).cloned().unwrap_or_else(|| Poly::zero(&self.table))
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, alpha: Monomial, coeff: &Poly) {
        assert!(same_table(&self.table, coeff.table()), "table mismatch");
        if coeff.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| Poly::zero(&self.table));
        slot.add_assign_ref(coeff);
        if slot.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    fn check_table(&self, other: &Arc<VarTable>) -> Result<()> {
        if same_table(&self.table, other) {
            Ok(())
        } else {
            Err(Error::TableMismatch(self.table.to_string(), other.to_string()))
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &DiffOp) {
        for (a, c) in &other.terms {
            self.add_term(a.clone(), c);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &DiffOp, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (a, p) in &other.terms {
            self.add_term(a.clone(), &p.scale(c));
        }
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(&self.table);
        out.add_scaled(self, c);
        out
    }

    /// Applies the operator to a polynomial.
    pub fn apply(&self, a: &Poly) -> Poly {
        assert!(same_table(&self.table, a.table()), "table mismatch");
        let mut out = Poly::zero(&self.table);
        for (alpha, c) in &self.terms {
            let d = a.diff_multi(alpha);
            if !d.is_zero() {
                out.add_assign_ref(&(c * &d));
            }
        }
        out
    }

    pub fn checked_apply(&self, a: &Poly) -> Result<Poly> {
        self.check_table(a.table())?;
        Ok(self.apply(a))
    }

    /// Normal-ordered product `self ∘ other`, via
    /// `d^a (b f) = sum_{g <= a} C(a, g) (d^g b) d^(a - g) f`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        assert!(same_table(&self.table, other.table()), "table mismatch");
        let mut out = DiffOp::zero(&self.table);
        for (alpha, a) in &self.terms {
            let gammas = alpha.divisors();
            for (beta, b) in &other.terms {
                for gamma in &gammas {
                    let db = b.diff_multi(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let binom = Rational::from_integer(alpha.binomial(gamma));
                    let rest = alpha.checked_div(gamma).expect("gamma divides alpha");
                    let coeff = (a * &db).scale(&binom);
                    out.add_term(rest.mul(beta), &coeff);
                }
            }
        }
        out
    }

    pub fn checked_compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_table(other.table())?;
        Ok(self.compose(other))
    }

    /// `[self, other] = self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }

    /// Recognizes operators of the form `sum_i w_i x_i d_i + c` with rational
    /// `w_i` and `c`. Such an operator maps each monomial `x^a` to
    /// `(w . a + c) x^a`.
    pub fn diagonal_weights(&self) -> Option<(Vec<Rational>, Rational)> {
        let nv = self.table.len();
        let mut weights = vec![Rational::zero(); nv];
        let mut constant = Rational::zero();
        for (alpha, c) in &self.terms {
            if c.len() != 1 {
                return None;
            }
            let (m, coeff) = c.terms().next().expect("nonzero coefficient");
            if m != alpha {
                return None;
            }
            match alpha.degree() {
                0 => constant = coeff.clone(),
                1 => {
                    let v = alpha.exps().iter().position(|&e| e == 1).expect("degree one");
                    weights[v] = coeff.clone();
                }
                _ => return None,
            }
        }
        Some((weights, constant))
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let derivs: Vec<String> = alpha
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.table.name(Var(i));
                    if e == 1 {
                        format!("d[{name}]")
                    } else {
                        format!("d[{name}]^{e}")
                    }
                })
                .collect();
            if derivs.is_empty() {
                write!(f, "({c})")?;
            } else if c.len() == 1 && c.coeff(&Monomial::one(self.table.len())).is_one() {
                write!(f, "{}", derivs.join("*"))?;
            } else {
                write!(f, "({c})*{}", derivs.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Text form of a weight vector, used by diagnostics.
pub fn fmt_weights(w: &[Rational]) -> String {
    let parts: Vec<String> = w.iter().map(fmt_rational).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x_table() -> (Arc<VarTable>, Var) {
        let t = VarTable::base(1);
        let x = t.p(1);
        (t, x)
    }

    #[test]
    fn apply_examples() {
        let (t, x) = x_table();
        let px = Poly::var(&t, x);
        let dx = DiffOp::partial(&t, x);
        assert_eq!(dx.apply(&px.pow(2)), px.scale(&int(2)));
        let euler = DiffOp::vector(px.clone(), x);
        assert_eq!(euler.apply(&px.pow(3)), px.pow(3).scale(&int(3)));
        let f = &px.pow(2) + &Poly::var(&t, t.t());
        assert_eq!(DiffOp::identity(&t).apply(&f), f);
    }

    #[test]
    fn canonical_commutation() {
        let (t, x) = x_table();
        let px = Poly::var(&t, x);
        let dx = DiffOp::partial(&t, x);
        let mx = DiffOp::multiplication(&px);
        let lhs = dx.compose(&mx);
        let rhs = DiffOp::vector(px.clone(), x).add(&DiffOp::identity(&t));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_squared() {
        let (t, x) = x_table();
        let px = Poly::var(&t, x);
        let e = DiffOp::vector(px.clone(), x);
        let sq = e.compose(&e);
        let expected = DiffOp::term(px.pow(2), Monomial::new(vec![2, 0, 0])).add(&e);
        assert_eq!(sq, expected);
        for m in 0..4u32 {
            let xm = px.pow(m);
            assert_eq!(sq.apply(&xm), e.apply(&e.apply(&xm)));
            assert_eq!(sq.apply(&xm), xm.scale(&int((m * m) as i64)));
        }
    }

    #[test]
    fn identity_is_neutral() {
        let (t, x) = x_table();
        let a = DiffOp::vector(Poly::var(&t, t.t()), x).add(&DiffOp::scalar(&t, int(3)));
        assert_eq!(a.compose(&DiffOp::identity(&t)), a);
        assert_eq!(DiffOp::identity(&t).compose(&a), a);
    }

    #[test]
    fn diagonal_detection() {
        let (t, x) = x_table();
        let e = DiffOp::vector(Poly::var(&t, x).scale(&int(-2)), x).add(&DiffOp::scalar(&t, int(5)));
        let (w, c) = e.diagonal_weights().unwrap();
        assert_eq!(w[0], int(-2));
        assert_eq!(c, int(5));
        assert!(DiffOp::partial(&t, x).diagonal_weights().is_none());
    }

    #[test]
    fn table_mismatch() {
        let a = DiffOp::identity(&VarTable::base(1));
        let b = DiffOp::identity(&VarTable::base(2));
        assert!(a.checked_compose(&b).is_err());
        assert!(a.checked_apply(&Poly::one(&VarTable::base(2))).is_err());
    }
}
