//! The quadratic Casimir of `sp(2n+2)` acting on `R^k_δ`: assembly from dual
//! bases, the closed diagonal form, eigenvalues, and matrix certificates.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::algebra::json::poly_to_json;
use crate::algebra::{fmt_rational, int, rat, Block, Coord, DiffOp, Monomial, Poly, Rational, VarTable};
use crate::contact::{sp_basis, SpBasis, SpLabel};
use crate::equivariant::{commutation_r, composite_op, symbol_monomials};
use crate::error::{Error, Result};
use crate::symbols::{basis_actions, ActionContext, Module, SymbolElem};

/// `c(k,δ) = (n+1)²δ² − (n+1)²δ + k(n+1)δ + (k²−k)/2`.
pub fn c_value(n: usize, k: u32, delta: &Rational) -> Rational {
    let n1 = int((n + 1) as i64);
    let kk = int(k as i64);
    &n1 * &n1 * delta * delta - &n1 * &n1 * delta + &kk * &n1 * delta + (&kk * &kk - &kk) / int(2)
}

/// `ε^{k,ℓ}_δ = (c(k,δ) + r(ℓ, k−ℓ)) / (n+2)`.
pub fn eigenvalue(n: usize, k: u32, l: u32, delta: &Rational) -> Result<Rational> {
    if l > k {
        return Err(Error::InvalidParameter(format!("l = {l} exceeds k = {k}")));
    }
    Ok((c_value(n, k, delta) + commutation_r(l, k - l, delta, n)) / int((n + 2) as i64))
}

pub fn eigenvalues(n: usize, k: u32, delta: &Rational) -> Vec<Rational> {
    (0..=k).map(|l| eigenvalue(n, k, l, delta).unwrap()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasimirForm {
    /// `Σ_a L_{e_a} ∘ L_{e^a}`.
    DualSum,
    /// The regrouped eight-term expression.
    EqCasimir2,
}

impl CasimirForm {
    pub fn parse(s: &str) -> Result<CasimirForm> {
        match s {
            "dual_sum" | "dual-sum" => Ok(CasimirForm::DualSum),
            "eq_casimir2" | "eq-casimir2" => Ok(CasimirForm::EqCasimir2),
            _ => Err(Error::Parse(format!("unknown Casimir form {s:?}"))),
        }
    }
}

fn r_module(k: u32, delta: &Rational) -> Module {
    Module::r(k, delta.clone())
}

/// `L_X` on `R^k_δ` for every basis generator, in basis order.
pub fn actions(basis: &SpBasis, k: u32, delta: &Rational) -> Vec<DiffOp> {
    basis_actions(basis, &ActionContext::new(basis.n(), r_module(k, delta)))
}

pub fn assemble_casimir(n: usize, k: u32, delta: &Rational, form: CasimirForm) -> Result<DiffOp> {
    let basis = sp_basis(n)?;
    let ls = actions(&basis, k, delta);
    Ok(match form {
        CasimirForm::DualSum => dual_sum(&basis, &ls),
        CasimirForm::EqCasimir2 => {
            let mut out = DiffOp::zero(&VarTable::with_xi(n));
            for t in casimir_terms(&basis, &ls) {
                out.add_assign(&t);
            }
            out
        }
    })
}

fn dual_sum(basis: &SpBasis, ls: &[DiffOp]) -> DiffOp {
    let parts: Vec<DiffOp> = (0..basis.dim())
        .into_par_iter()
        .map(|a| {
            let mut dual = DiffOp::zero(ls[a].table());
            for (c, b) in basis.dual(a) {
                dual.add_scaled(&ls[*b], c);
            }
            ls[a].compose(&dual)
        })
        .collect();
    let mut out = DiffOp::zero(ls[0].table());
    for p in &parts {
        out.add_assign(p);
    }
    out
}

/// The eight groups `T_1..T_8` of the regrouped Casimir.
pub fn casimir_terms(basis: &SpBasis, ls: &[DiffOp]) -> Vec<DiffOp> {
    let n = basis.n();
    let l = |label: SpLabel| &ls[basis.index_of(label).expect("label in basis")];
    let table = ls[0].table().clone();
    let m = int((n + 2) as i64);
    let n1 = int((n + 1) as i64);
    let zero = || DiffOp::zero(&table);

    let t1 = l(SpLabel::T2).compose(l(SpLabel::One)).scale(&(-Rational::one() / (int(4) * &m)));
    let t2 = l(SpLabel::T).compose(l(SpLabel::T)).scale(&(Rational::one() / (int(4) * &m)));
    let mut t3 = zero();
    let mut t4 = zero();
    let mut t5 = zero();
    let mut t6 = zero();
    let mut t8 = zero();
    for i in 1..=n {
        t3.add_assign(&l(SpLabel::TQ(i)).compose(l(SpLabel::P(i))));
        t3 = t3.sub(&l(SpLabel::TP(i)).compose(l(SpLabel::Q(i))));
        t4.add_assign(&l(SpLabel::PP(i, i)).compose(l(SpLabel::QQ(i, i))));
        for j in 1..=n {
            if i < j {
                t5.add_assign(&l(SpLabel::PP(i, j)).compose(l(SpLabel::QQ(i, j))));
            }
            t6.add_assign(&l(SpLabel::PQ { p: i, q: j }).compose(l(SpLabel::PQ { p: j, q: i })));
        }
        t8.add_assign(l(SpLabel::PQ { p: i, q: i }));
    }
    let t3 = t3.scale(&(Rational::one() / (int(2) * &m)));
    let t4 = t4.scale(&(-Rational::one() / (int(4) * &m)));
    let t5 = t5.scale(&(-Rational::one() / (int(2) * &m)));
    let t6 = t6.scale(&(Rational::one() / (int(4) * &m)));
    let t7 = l(SpLabel::T).scale(&(&n1 / (int(2) * &m)));
    let t8 = t8.scale(&(&n1 / (int(4) * &m)));
    vec![t1, t2, t3, t4, t5, t6, t7, t8]
}

/// `(1/(n+2))(c(k,δ)·id + X∘i_α)`; the `X`-leg acts on `R^{k−1}_δ`.
pub fn closed_form(n: usize, k: u32, delta: &Rational) -> Result<DiffOp> {
    let table = VarTable::with_xi(n);
    let mut op = DiffOp::scalar(&table, c_value(n, k, delta));
    if k > 0 {
        op.add_assign(&composite_op(n, r_module(k, delta), 1, 1)?.diffop);
    }
    Ok(op.scale(&rat(1, (n + 2) as i64)))
}

/// Outcome of comparing the assembled Casimir with its closed form.
#[derive(Clone, Debug)]
pub struct CasimirResult {
    pub n: usize,
    pub k: u32,
    pub delta: Rational,
    pub assembled: DiffOp,
    pub closed_form: DiffOp,
    pub c_value: Rational,
    pub eigenvalues: Vec<Rational>,
    pub max_base_degree: u32,
    pub spot_degree: u32,
    pub tested: usize,
    pub verified: bool,
    /// First differing monomial and the difference of the two images.
    pub counterexample: Option<(Monomial, Poly)>,
}

impl CasimirResult {
    pub fn to_json(&self) -> serde_json::Value {
        let table = self.assembled.table();
        json!({
            "n": self.n,
            "k": self.k,
            "delta": fmt_rational(&self.delta),
            "c": fmt_rational(&self.c_value),
            "eigenvalues": self.eigenvalues.iter().map(fmt_rational).collect::<Vec<_>>(),
            "verified": self.verified,
            "family": {"max_base_degree": self.max_base_degree, "spot_degree": self.spot_degree, "tested": self.tested},
            "counterexample": self.counterexample.as_ref().map(|(m, d)| json!({
                "monomial": Poly::term(table, m.clone(), Rational::one()).to_string(),
                "difference": poly_to_json(d),
            })),
        })
    }
}

/// Seeded monomials `x^a ξ^b` with `|a| = degree`, `|b| = k`.
pub fn random_monomials(table: &Arc<VarTable>, k: u32, degree: u32, count: usize, seed: u64) -> Vec<Monomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<usize> = table.coords().map(|c| table.coord(c).0).collect();
    let fib: Vec<usize> = table.block_vars(Block::Xi).iter().map(|v| v.0).collect();
    let mut out = BTreeSet::new();
    for _ in 0..count {
        let mut e = vec![0u16; table.len()];
        for _ in 0..degree {
            e[base[rng.gen_range(0..base.len())]] += 1;
        }
        for _ in 0..k {
            e[fib[rng.gen_range(0..fib.len())]] += 1;
        }
        out.insert(Monomial::new(e));
    }
    out.into_iter().collect()
}

/// First monomial (in the given order) on which two operators disagree.
pub fn first_disagreement(a: &DiffOp, b: &DiffOp, family: &[Monomial]) -> Option<(Monomial, Poly)> {
    let t = a.table().clone();
    family
        .par_iter()
        .map(|m| {
            let s = Poly::term(&t, m.clone(), Rational::one());
            let d = &a.apply(&s) - &b.apply(&s);
            (!d.is_zero()).then(|| (m.clone(), d))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}

pub fn verify_diagonal_form(n: usize, k: u32, delta: &Rational, max_base_degree: u32, seed: u64) -> Result<CasimirResult> {
    let assembled = assemble_casimir(n, k, delta, CasimirForm::DualSum)?;
    let closed = closed_form(n, k, delta)?;
    let table = VarTable::with_xi(n);
    let spot_degree = 7;
    let mut family = symbol_monomials(&table, k, max_base_degree);
    family.extend(random_monomials(&table, k, spot_degree, 8, seed));
    let counterexample = first_disagreement(&assembled, &closed, &family);
    Ok(CasimirResult {
        n,
        k,
        delta: delta.clone(),
        c_value: c_value(n, k, delta),
        eigenvalues: eigenvalues(n, k, delta),
        max_base_degree,
        spot_degree,
        tested: family.len(),
        verified: counterexample.is_none(),
        counterexample,
        assembled,
        closed_form: closed,
    })
}

/// Both assemblies agree on `family`.
pub fn forms_agree(n: usize, k: u32, delta: &Rational, family: &[Monomial]) -> Result<bool> {
    let a = assemble_casimir(n, k, delta, CasimirForm::DualSum)?;
    let b = assemble_casimir(n, k, delta, CasimirForm::EqCasimir2)?;
    Ok(first_disagreement(&a, &b, family).is_none())
}

/// `[C, L_X] = 0` on `{x^a ξ^b : |a| ≤ D, |b| = k}` for every generator.
pub fn centrality(n: usize, k: u32, delta: &Rational, max_base_degree: u32) -> Result<bool> {
    let basis = sp_basis(n)?;
    let ls = actions(&basis, k, delta);
    let c = dual_sum(&basis, &ls);
    let family = symbol_monomials(&VarTable::with_xi(n), k, max_base_degree);
    Ok(ls.par_iter().all(|l| first_disagreement(&c.compose(l), &l.compose(&c), &family).is_none()))
}

/// Matrix of the Casimir on a finite monomial family.
#[derive(Clone, Debug)]
pub struct CasimirMatrix {
    pub family: Vec<Monomial>,
    /// `matrix[i][j]`: coefficient of `family[i]` in `C(family[j])`.
    pub matrix: Vec<Vec<Rational>>,
    /// Monomials of the family whose image leaves the span.
    pub overflow: Vec<Monomial>,
    /// The largest subfamily mapped into its own span.
    pub closed_family: Vec<Monomial>,
    pub closed_matrix: Vec<Vec<Rational>>,
    /// `Π_ℓ (M − ε_ℓ) = 0` on the closed subfamily.
    pub annihilated: bool,
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Rational::zero();
                    for (t, bt) in b.iter().enumerate() {
                        if !a[i][t].is_zero() && !bt[j].is_zero() {
                            s += &a[i][t] * &bt[j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn matrix_on(images: &BTreeMap<Monomial, Poly>, family: &[Monomial]) -> Vec<Vec<Rational>> {
    family
        .iter()
        .map(|row| family.iter().map(|col| images[col].coeff(row)).collect())
        .collect()
}

pub fn casimir_matrix(n: usize, k: u32, delta: &Rational, base_degree: u32) -> Result<CasimirMatrix> {
    let c = assemble_casimir(n, k, delta, CasimirForm::DualSum)?;
    let table = c.table().clone();
    let family = symbol_monomials(&table, k, base_degree);
    let images: BTreeMap<Monomial, Poly> = family
        .par_iter()
        .map(|m| (m.clone(), c.apply(&Poly::term(&table, m.clone(), Rational::one()))))
        .collect();
    let in_family = |set: &BTreeSet<Monomial>, m: &Monomial| images[m].terms().all(|(t, _)| set.contains(t));
    let all: BTreeSet<Monomial> = family.iter().cloned().collect();
    let overflow: Vec<Monomial> = family.iter().filter(|m| !in_family(&all, m)).cloned().collect();
    let mut closed = all;
    loop {
        let drop: Vec<Monomial> = closed.iter().filter(|m| !in_family(&closed, m)).cloned().collect();
        if drop.is_empty() {
            break;
        }
        for m in drop {
            closed.remove(&m);
        }
    }
    let closed_family: Vec<Monomial> = closed.into_iter().collect();
    let matrix = matrix_on(&images, &family);
    let closed_matrix = matrix_on(&images, &closed_family);
    let size = closed_family.len();
    let mut prod: Vec<Vec<Rational>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut distinct = eigenvalues(n, k, delta);
    distinct.sort();
    distinct.dedup();
    for e in &distinct {
        let mut shifted = closed_matrix.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] -= e;
        }
        prod = mat_mul(&shifted, &prod);
    }
    let annihilated = prod.iter().all(|r| r.iter().all(Zero::is_zero));
    Ok(CasimirMatrix { family, matrix, overflow, closed_family, closed_matrix, annihilated })
}

/// `P = p_1 ξ_t + ξ_{q_1}`, which lies in the kernel of `i_α`.
pub fn p_probe(n: usize) -> Poly {
    let t = VarTable::with_xi(n);
    &Poly::var(&t, t.p(1)) * &Poly::var(&t, t.fv(Block::Xi, Coord::T)) + Poly::var(&t, t.fv(Block::Xi, Coord::Q(1)))
}

/// Expected scalars of `T_1..T_8` on `P^k`.
pub fn expected_term_constants(n: usize, k: u32, delta: &Rational) -> Vec<Rational> {
    let m = int((n + 2) as i64);
    let n1 = int((n + 1) as i64);
    let kk = int(k as i64);
    let a = int(2) * &n1 * delta + &kk;
    let nm1 = int(n as i64 - 1);
    vec![
        Rational::zero(),
        &a * &a / (int(4) * &m),
        Rational::zero(),
        &kk / &m,
        &kk * &nm1 / (int(2) * &m),
        &kk * (&nm1 + &kk) / (int(4) * &m),
        -(&n1 * &a) / (int(2) * &m),
        -(&kk * &n1) / (int(4) * &m),
    ]
}

/// The scalar `s` with `image = s·probe`, if any.
pub fn eigen_scalar(image: &Poly, probe: &Poly) -> Option<Rational> {
    let (m, c) = probe.terms().next()?;
    let s = image.coeff(m) / c;
    (image == &probe.scale(&s)).then_some(s)
}

/// Measured scalars of `T_1..T_8` on `P^k`, each `None` if `P^k` is not an
/// eigenvector of that term.
pub fn measured_term_constants(n: usize, k: u32, delta: &Rational) -> Result<Vec<Option<Rational>>> {
    let basis = sp_basis(n)?;
    let ls = actions(&basis, k, delta);
    let probe = p_probe(n).pow(k);
    Ok(casimir_terms(&basis, &ls).iter().map(|t| eigen_scalar(&t.apply(&probe), &probe)).collect())
}

/// The constants `c_1`, `c_2` of `C = c^k_0 id + c_1 X∘i_α + c_2 X²∘i_α²`,
/// recovered from measured `ℓ = 0` eigenvalues on `R^k`, `R^{k−1}`, `R^{k−2}`.
pub fn recover_constants(n: usize, k: u32, delta: &Rational) -> Result<(Rational, Rational)> {
    if k < 2 {
        return Err(Error::InvalidParameter("constant recovery needs k >= 2".into()));
    }
    let measure = |j: u32| -> Result<Rational> {
        let c = assemble_casimir(n, j, delta, CasimirForm::DualSum)?;
        let probe = p_probe(n).pow(j);
        eigen_scalar(&c.apply(&probe), &probe)
            .ok_or_else(|| Error::Singular(format!("P^{j} is not a Casimir eigenvector")))
    };
    let (c0, c1m, c2m) = (measure(k)?, measure(k - 1)?, measure(k - 2)?);
    let r1 = commutation_r(1, k - 1, delta, n);
    let r1b = commutation_r(1, k - 2, delta, n);
    let r2 = commutation_r(2, k - 2, delta, n);
    if r1.is_zero() || r1b.is_zero() || r2.is_zero() {
        return Err(Error::Singular("commutation constant vanishes".into()));
    }
    let c1 = (&c1m - &c0) / &r1;
    let c2 = (&r1 * (&c2m - &c0) - &r2 * (&c1m - &c0)) / (&r1 * &r1b * &r2);
    Ok((c1, c2))
}

/// Components of `s` from the spectral projectors
/// `Π_{j≠ℓ}(C − ε_j)/(ε_ℓ − ε_j)` of the assembled Casimir.
pub fn spectral_components(casimir: &DiffOp, eigenvalues: &[Rational], s: &SymbolElem) -> Result<Vec<Poly>> {
    let t = casimir.table();
    let p = s.poly.lift(t)?;
    let mut out = Vec::with_capacity(eigenvalues.len());
    for (l, el) in eigenvalues.iter().enumerate() {
        let mut v = p.clone();
        for (j, ej) in eigenvalues.iter().enumerate() {
            if j == l {
                continue;
            }
            let denom = el - ej;
            if denom.is_zero() {
                return Err(Error::Singular(format!("eigenvalues {l} and {j} coincide")));
            }
            v = (&casimir.apply(&v) - &v.scale(ej)).scale(&(Rational::one() / denom));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_and_eigenvalues() {
        assert_eq!(c_value(1, 0, &rat(1, 3)), rat(-8, 9));
        assert_eq!(eigenvalues(1, 1, &int(1)), vec![rat(2, 3), int(0)]);
        assert!(eigenvalue(1, 1, 2, &int(1)).is_err());
        let e = eigenvalues(1, 3, &rat(1, 3));
        let set: BTreeSet<_> = e.iter().collect();
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn assembled_examples() {
        let t = VarTable::with_xi(1);
        let c = assemble_casimir(1, 0, &rat(1, 3), CasimirForm::DualSum).unwrap();
        let f = &Poly::var(&t, t.p(1)) * &Poly::var(&t, t.t());
        assert_eq!(c.apply(&f), f.scale(&rat(-8, 27)));
        let c = assemble_casimir(1, 0, &int(0), CasimirForm::DualSum).unwrap();
        assert!(c.apply(&Poly::one(&t)).is_zero());
        let c = assemble_casimir(1, 1, &int(1), CasimirForm::DualSum).unwrap();
        assert!(c.apply(&Poly::var(&t, t.fv(Block::Xi, Coord::T))).is_zero());
    }

    #[test]
    fn diagonal_form_small() {
        for k in 0..=2 {
            let r = verify_diagonal_form(1, k, &rat(1, 3), 2, 1).unwrap();
            assert!(r.verified, "k={k}: {:?}", r.counterexample);
        }
    }

    #[test]
    fn forms_agree_small() {
        let t = VarTable::with_xi(1);
        let fam = random_monomials(&t, 2, 3, 30, 5);
        assert!(forms_agree(1, 2, &rat(1, 3), &fam).unwrap());
    }

    #[test]
    fn term_constants() {
        for k in 1..=2 {
            let d = rat(1, 3);
            let measured = measured_term_constants(1, k, &d).unwrap();
            let expected = expected_term_constants(1, k, &d);
            for (m, e) in measured.iter().zip(&expected) {
                assert_eq!(m.as_ref(), Some(e));
            }
            let sum: Rational = expected.iter().sum();
            assert_eq!(sum, c_value(1, k, &d) / int(3));
        }
        assert_eq!(recover_constants(1, 2, &rat(1, 3)).unwrap(), (rat(1, 3), int(0)));
    }

    #[test]
    fn matrices() {
        let m = casimir_matrix(1, 0, &int(0), 1).unwrap();
        assert!(m.matrix.iter().all(|r| r.iter().all(Zero::is_zero)));
        let m = casimir_matrix(1, 1, &int(1), 0).unwrap();
        assert!(m.annihilated);
        let m = casimir_matrix(1, 2, &rat(1, 3), 1).unwrap();
        assert!(m.annihilated && !m.closed_family.is_empty());
    }

    #[test]
    fn central_small() {
        assert!(centrality(1, 1, &rat(-5, 7), 2).unwrap());
    }
}
