//! Arithmetic constraints on invariant operators `R^k_δ → R^{k'}_{δ'}`:
//! eigenvalue matching between blocks, discriminants, and the rational
//! weight forced by three independent blocks.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::linalg::{rank, solve};
use crate::algebra::rational::rational_sqrt;
use crate::algebra::{fmt_rational, int, Rational};
use crate::casimir::eigenvalue;
use crate::equivariant::check_noncritical;
use crate::error::{Error, Result};

fn n1(n: usize) -> Rational {
    int((n + 1) as i64)
}

fn z(v: i64) -> Rational {
    int(v)
}

/// Residual of the matching equation between block `ℓ` of `R^k_δ` and block
/// `ℓ'` of `R^{k'}_{δ'}`. It equals `2(n+2)(ε^{k,ℓ}_δ − ε^{k',ℓ'}_{δ'})`.
#[allow(clippy::too_many_arguments)]
pub fn relation_r(n: usize, k: u32, kp: u32, l: u32, lp: u32, delta: &Rational, deltap: &Rational) -> Rational {
    let a = n1(n);
    let (k, kp, l, lp) = (k as i64, kp as i64, l as i64, lp as i64);
    z(2) * &a * &a * (delta + deltap - z(1)) * (delta - deltap) + z((k + kp - 1) * (k - kp))
        + z(2) * &a * (z(k) * delta - z(kp) * deltap)
        - z(2) * &a * (z(l) * delta - z(lp) * deltap)
        - z(2 * (l * k - lp * kp))
        + z((l + lp + 1) * (l - lp))
}

/// The constant `c` with `relation_r = c·(n+2)·(ε − ε')`.
pub const RELATION_SCALE: i64 = 2;

/// All `(ℓ, ℓ')` with equal eigenvalues, and whether `ℓ ↦ ℓ'` is an injective map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissiblePairs {
    pub pairs: Vec<(u32, u32)>,
    /// Each `ℓ` matches at most one `ℓ'`.
    pub functional: bool,
    pub injective: bool,
}

pub fn admissible_pairs(n: usize, k: u32, kp: u32, delta: &Rational, deltap: &Rational) -> Result<AdmissiblePairs> {
    check_noncritical(delta, k, n)?;
    check_noncritical(deltap, kp, n)?;
    let mut pairs = Vec::new();
    for l in 0..=k {
        for lp in 0..=kp {
            if relation_r(n, k, kp, l, lp, delta, deltap).is_zero() {
                pairs.push((l, lp));
            }
        }
    }
    let left: BTreeSet<u32> = pairs.iter().map(|p| p.0).collect();
    let right: BTreeSet<u32> = pairs.iter().map(|p| p.1).collect();
    Ok(AdmissiblePairs {
        functional: left.len() == pairs.len(),
        injective: right.len() == pairs.len(),
        pairs,
    })
}

/// Brute-force oracle through the eigenvalues themselves.
pub fn admissible_pairs_by_eigenvalues(n: usize, k: u32, kp: u32, delta: &Rational, deltap: &Rational) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for l in 0..=k {
        let e = eigenvalue(n, k, l, delta).unwrap();
        for lp in 0..=kp {
            if e == eigenvalue(n, kp, lp, deltap).unwrap() {
                out.push((l, lp));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

fn sign_of(x: &Rational) -> Sign {
    if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// The matching equation as `A δ'² + B δ' + C = 0` for fixed `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Discriminant {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub linear: bool,
    pub discriminant: Rational,
    pub sign: Sign,
    /// Exact roots when the discriminant is a rational square (or the case is linear).
    pub roots: Vec<Rational>,
    /// Coefficients of the discriminant as a polynomial in `δ`, constant term first.
    pub discriminant_in_delta: [Rational; 3],
    /// Real roots exist.
    pub admissible: bool,
}

impl Discriminant {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "a": fmt_rational(&self.a),
            "b": fmt_rational(&self.b),
            "c": fmt_rational(&self.c),
            "linear": self.linear,
            "discriminant": fmt_rational(&self.discriminant),
            "sign": self.sign,
            "roots": self.roots.iter().map(fmt_rational).collect::<Vec<_>>(),
            "discriminant_in_delta": self.discriminant_in_delta.iter().map(fmt_rational).collect::<Vec<_>>(),
            "admissible": self.admissible,
        })
    }
}

pub fn discriminant_analysis(n: usize, k: u32, kp: u32, l: u32, lp: u32, delta: &Rational) -> Discriminant {
    let nn = n1(n);
    let (ki, kpi, li, lpi) = (k as i64, kp as i64, l as i64, lp as i64);
    let a = -(z(2) * &nn * &nn);
    let b = z(2) * &nn * &nn - z(2) * &nn * z(kpi) + z(2) * &nn * z(lpi);
    // C(δ) = c2 δ² + c1 δ + c0.
    let c2 = z(2) * &nn * &nn;
    let c1 = z(2) * &nn * z(ki - li) - z(2) * &nn * &nn;
    let c0 = z((ki + kpi - 1) * (ki - kpi)) - z(2 * (li * ki - lpi * kpi)) + z((li + lpi + 1) * (li - lpi));
    let c = &c2 * delta * delta + &c1 * delta + &c0;
    debug_assert_eq!(
        &a * z(0) + &b * z(0) + &c,
        relation_r(n, k, kp, l, lp, delta, &Rational::zero())
    );
    let disc = &b * &b - z(4) * &a * &c;
    let four_a = -(z(4) * &a);
    let disc_poly = [&b * &b + &four_a * &c0, &four_a * &c1, &four_a * &c2];
    // A never vanishes; the linear branch is kept for completeness.
    let linear = a.is_zero();
    let mut roots = Vec::new();
    if linear {
        if !b.is_zero() {
            roots.push(-&c / &b);
        }
    } else if let Some(s) = rational_sqrt(&disc) {
        let two_a = z(2) * &a;
        let mut rs = vec![(-&b + &s) / &two_a, (-&b - &s) / &two_a];
        rs.sort();
        rs.dedup();
        roots = rs;
    }
    let sign = sign_of(&disc);
    Discriminant {
        admissible: linear && !b.is_zero() || sign != Sign::Negative,
        a,
        b,
        c,
        linear,
        discriminant: disc,
        sign,
        roots,
        discriminant_in_delta: disc_poly,
    }
}

/// Data for several matching blocks `(ℓ_i, ℓ'_i)` of an operator
/// `R^k_δ → R^{k'}_{δ'}`; the first block is the reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DioInstance {
    pub n: usize,
    pub k: u32,
    pub kp: u32,
    #[serde(with = "crate::algebra::rational::serde_rational")]
    pub delta: Rational,
    #[serde(with = "crate::algebra::rational::serde_rational")]
    pub deltap: Rational,
    pub blocks: Vec<(u32, u32)>,
}

/// `Δ_j, Δ'_j, Σ_j, Σ'_j, λ_j` for block `j` (0-based, `j ≥ 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockData {
    pub d: i64,
    pub dp: i64,
    pub s: i64,
    pub sp: i64,
    pub lambda: i64,
}

pub fn block_data(blocks: &[(u32, u32)], j: usize) -> BlockData {
    let (l1, lp1) = (blocks[0].0 as i64, blocks[0].1 as i64);
    let (lj, lpj) = (blocks[j].0 as i64, blocks[j].1 as i64);
    let (d, dp, s, sp) = (l1 - lj, lp1 - lpj, l1 + lj, lp1 + lpj);
    BlockData { d, dp, s, sp, lambda: d - dp + d * s - dp * sp }
}

fn check_blocks(k: u32, kp: u32, blocks: &[(u32, u32)]) -> Result<()> {
    if let Some(b) = blocks.iter().find(|b| b.0 > k || b.1 > kp) {
        return Err(Error::InvalidParameter(format!("block {b:?} outside 0..={k} x 0..={kp}")));
    }
    Ok(())
}

/// `2(n+1)Δ_jδ − 2(n+1)Δ'_jδ' + 2Δ_jk − 2Δ'_jk'`, the left side of the
/// difference relation whose right side is `λ_j`.
pub fn rprime_lhs(inst: &DioInstance, j: usize) -> Rational {
    let b = block_data(&inst.blocks, j);
    let nn = n1(inst.n);
    z(2) * &nn * z(b.d) * &inst.delta - z(2) * &nn * z(b.dp) * &inst.deltap + z(2 * b.d * inst.k as i64)
        - z(2 * b.dp * inst.kp as i64)
}

/// Residual of the difference relation for block `j` (0-based, `j ≥ 1`),
/// signed so that it equals `R_1 − R_j`.
pub fn relation_rprime(inst: &DioInstance, j: usize) -> Result<Rational> {
    if j == 0 || j >= inst.blocks.len() {
        return Err(Error::InvalidParameter(format!(
            "block index {j} out of range 1..{}",
            inst.blocks.len()
        )));
    }
    check_blocks(inst.k, inst.kp, &inst.blocks)?;
    Ok(z(block_data(&inst.blocks, j).lambda) - rprime_lhs(inst, j))
}

pub fn relation_r_block(inst: &DioInstance, j: usize) -> Rational {
    let (l, lp) = inst.blocks[j];
    relation_r(inst.n, inst.k, inst.kp, l, lp, &inst.delta, &inst.deltap)
}

/// Outcome of the three-block analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct Kappa3 {
    pub delta: Rational,
    pub deltap: Rational,
    pub delta_linear: Rational,
    pub deltap_linear: Rational,
    /// Closed form and linear solve agree, and both residuals vanish.
    pub verified: bool,
}

impl Kappa3 {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "delta": fmt_rational(&self.delta),
            "deltap": fmt_rational(&self.deltap),
            "delta_linear": fmt_rational(&self.delta_linear),
            "deltap_linear": fmt_rational(&self.deltap_linear),
            "verified": self.verified,
        })
    }
}

/// `−(2k−1)/(2(n+1)) + L`.
pub fn kappa3_formula(n: usize, k: u32, blocks: &[(u32, u32)]) -> Result<Rational> {
    if blocks.len() != 3 {
        return Err(Error::InvalidParameter("exactly three blocks expected".into()));
    }
    let b2 = block_data(blocks, 1);
    let b3 = block_data(blocks, 2);
    let det = b2.d * b3.dp - b3.d * b2.dp;
    if det == 0 {
        return Err(Error::Singular("the pairs (Δ_2, Δ'_2) and (Δ_3, Δ'_3) are dependent".into()));
    }
    let num = b2.d * b3.dp * b2.s - b3.d * b2.dp * b3.s + b2.dp * b3.dp * (b3.sp - b2.sp);
    let l = z(num) / (z(2) * n1(n) * z(det));
    Ok(-z(2 * k as i64 - 1) / (z(2) * n1(n)) + l)
}

/// `δ` from the closed form, `δ'` from the same form with the roles of the
/// two modules exchanged, both checked against a direct solve of
/// `R'_2 = R'_3 = 0`.
pub fn kappa3_delta(n: usize, k: u32, kp: u32, blocks: &[(u32, u32)]) -> Result<Kappa3> {
    check_blocks(k, kp, blocks)?;
    let delta = kappa3_formula(n, k, blocks)?;
    let swapped: Vec<(u32, u32)> = blocks.iter().map(|&(a, b)| (b, a)).collect();
    let deltap = kappa3_formula(n, kp, &swapped)?;
    let nn = n1(n);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in 1..3 {
        let b = block_data(blocks, j);
        rows.push(vec![z(2) * &nn * z(b.d), -(z(2) * &nn * z(b.dp))]);
        rhs.push(z(b.lambda) - z(2 * b.d * k as i64) + z(2 * b.dp * kp as i64));
    }
    let sol = solve(&rows, &rhs, 2).ok_or_else(|| Error::Singular("linear system has no solution".into()))?;
    let inst = DioInstance { n, k, kp, delta: delta.clone(), deltap: deltap.clone(), blocks: blocks.to_vec() };
    let residuals_vanish = relation_rprime(&inst, 1)?.is_zero() && relation_rprime(&inst, 2)?.is_zero();
    Ok(Kappa3 {
        verified: sol[0] == delta && sol[1] == deltap && residuals_vanish,
        delta_linear: sol[0].clone(),
        deltap_linear: sol[1].clone(),
        delta,
        deltap,
    })
}

/// Dependence analysis for four or more blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Kappa4 {
    /// For each block `j ≥ 4`: `(c_2, c_3)` with `l_j = c_2 l_2 + c_3 l_3`, if any.
    pub dependent: Vec<Option<(Rational, Rational)>>,
    /// For each block `j ≥ 4`: `λ_j = c_2 λ_2 + c_3 λ_3`.
    pub lambda_consistent: Vec<bool>,
    pub rank: usize,
    pub augmented_rank: usize,
    /// The system in `(δ, δ', k, k')` is solvable.
    pub compatible: bool,
    /// Five or more blocks with no common solution.
    pub incompatible: bool,
}

impl Kappa4 {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dependent": self.dependent.iter().map(|d| d.as_ref().map(|(a, b)| [fmt_rational(a), fmt_rational(b)])).collect::<Vec<_>>(),
            "lambda_consistent": self.lambda_consistent,
            "rank": self.rank,
            "augmented_rank": self.augmented_rank,
            "compatible": self.compatible,
            "incompatible": self.incompatible,
        })
    }
}

/// Coefficient row `l_j = (2(n+1)Δ_j, −2(n+1)Δ'_j, 2Δ_j, −2Δ'_j)` acting on `(δ, δ', k, k')`.
pub fn coefficient_row(n: usize, blocks: &[(u32, u32)], j: usize) -> Vec<Rational> {
    let b = block_data(blocks, j);
    let nn = n1(n);
    vec![z(2) * &nn * z(b.d), -(z(2) * &nn * z(b.dp)), z(2 * b.d), z(-2 * b.dp)]
}

pub fn kappa4_consistency(n: usize, blocks: &[(u32, u32)]) -> Result<Kappa4> {
    if blocks.len() < 4 {
        return Err(Error::InvalidParameter("at least four blocks expected".into()));
    }
    let rows: Vec<Vec<Rational>> = (1..blocks.len()).map(|j| coefficient_row(n, blocks, j)).collect();
    let lambdas: Vec<Rational> = (1..blocks.len()).map(|j| z(block_data(blocks, j).lambda)).collect();
    // Columns l_2, l_3 as a 4×2 system.
    let basis: Vec<Vec<Rational>> = (0..4).map(|i| vec![rows[0][i].clone(), rows[1][i].clone()]).collect();
    let mut dependent = Vec::new();
    let mut lambda_consistent = Vec::new();
    for j in 2..rows.len() {
        match solve(&basis, &rows[j], 2) {
            Some(c) => {
                lambda_consistent.push(&c[0] * &lambdas[0] + &c[1] * &lambdas[1] == lambdas[j]);
                dependent.push(Some((c[0].clone(), c[1].clone())));
            }
            None => {
                lambda_consistent.push(false);
                dependent.push(None);
            }
        }
    }
    let augmented: Vec<Vec<Rational>> = rows
        .iter()
        .zip(&lambdas)
        .map(|(r, l)| r.iter().cloned().chain(std::iter::once(l.clone())).collect())
        .collect();
    let rk = rank(&rows, 4);
    let ark = rank(&augmented, 5);
    Ok(Kappa4 {
        dependent,
        lambda_consistent,
        rank: rk,
        augmented_rank: ark,
        compatible: rk == ark,
        incompatible: blocks.len() >= 5 && rk != ark,
    })
}

/// `{a/b : |a| ≤ max_num, 1 ≤ b ≤ max_den}`, sorted and without repeats.
pub fn grid_values(max_num: i64, max_den: i64) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    for b in 1..=max_den {
        for a in -max_num..=max_num {
            set.insert(Rational::new(a.into(), b.into()));
        }
    }
    set.into_iter().collect()
}

/// Pair lists for every grid point, keyed by `(δ, δ')`.
pub fn pairs_on_grid(
    n: usize,
    k: u32,
    kp: u32,
    grid: &[Rational],
) -> BTreeMap<(Rational, Rational), AdmissiblePairs> {
    let mut out = BTreeMap::new();
    for d in grid {
        for dp in grid {
            if let Ok(p) = admissible_pairs(n, k, kp, d, dp) {
                out.insert((d.clone(), dp.clone()), p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn relation_examples() {
        let d = rat(2, 7);
        assert!(relation_r(1, 2, 2, 1, 1, &d, &d).is_zero());
        for (k, kp, l, lp, a, b) in [(1, 0, 1, 0, int(1), int(0)), (3, 2, 1, 2, rat(1, 3), rat(-5, 7))] {
            let e = eigenvalue(1, k, l, &a).unwrap() - eigenvalue(1, kp, lp, &b).unwrap();
            assert_eq!(relation_r(1, k, kp, l, lp, &a, &b), z(RELATION_SCALE) * z(3) * e);
        }
    }

    #[test]
    fn pair_examples() {
        let d = rat(1, 3);
        assert_eq!(admissible_pairs(1, 1, 1, &d, &d).unwrap().pairs, vec![(0, 0), (1, 1)]);
        // δ' = 0 is critical only for k' ≥ 1.
        assert_eq!(admissible_pairs(1, 1, 0, &int(1), &int(0)).unwrap().pairs, vec![(1, 0)]);
        assert!(matches!(admissible_pairs(1, 1, 1, &int(0), &d), Err(Error::CriticalWeight { .. })));
    }

    #[test]
    fn discriminant_examples() {
        let r = discriminant_analysis(1, 1, 0, 1, 0, &int(1));
        assert_eq!(r.roots, vec![int(0), int(1)]);
        assert_eq!(r.discriminant_in_delta[2], z(16 * 16));
        let d = rat(3, 11);
        let r = discriminant_analysis(2, 3, 3, 1, 1, &d);
        assert!(r.roots.contains(&d));
    }

    #[test]
    fn rprime_examples() {
        let inst = DioInstance { n: 1, k: 3, kp: 2, delta: rat(1, 5), deltap: rat(-2, 3), blocks: vec![(2, 1), (0, 0), (2, 1)] };
        assert_eq!(block_data(&inst.blocks, 1).lambda, 4);
        assert!(relation_rprime(&inst, 2).unwrap().is_zero());
        assert_eq!(relation_rprime(&inst, 1).unwrap(), relation_r_block(&inst, 0) - relation_r_block(&inst, 1));
        assert!(relation_rprime(&inst, 3).is_err());
    }

    #[test]
    fn kappa3_example() {
        let r = kappa3_delta(1, 3, 2, &[(2, 1), (0, 0), (1, 1)]).unwrap();
        assert!(r.verified);
        assert!(kappa3_delta(1, 3, 2, &[(2, 1), (0, 0), (0, 0)]).is_err());
    }

    #[test]
    fn kappa4_examples() {
        let r = kappa4_consistency(1, &[(2, 1), (0, 0), (1, 1), (0, 0)]).unwrap();
        assert_eq!(r.dependent[0], Some((int(1), int(0))));
        assert!(r.lambda_consistent[0] && r.compatible);
        let r = kappa4_consistency(1, &[(3, 3), (0, 0), (1, 2), (2, 0), (3, 1)]).unwrap();
        assert!(!r.compatible && r.incompatible);
    }
}
