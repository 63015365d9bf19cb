//! Aggregated property suite behind `pcontact selftest`.

use serde::Serialize;

use crate::algebra::{int, rat, Rational};
use crate::checks::{self, CheckOutcome, Fault};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Result<Level> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Parse(format!("unknown level {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub level: Level,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

pub fn run_selftest(level: Level, seed: u64, fault: Option<Fault>) -> SelftestReport {
    let third = rat(1, 3);
    let deltas: Vec<Rational> = match level {
        Level::Fast => vec![third.clone(), int(2)],
        Level::Full => vec![third.clone(), rat(-5, 7), int(2)],
    };
    let (kmax, dmax, samples) = match level {
        Level::Fast => (2u32, 3u32, 20usize),
        Level::Full => (3, 4, 100),
    };
    let ks: Vec<u32> = (0..=kmax).collect();
    let ns: &[usize] = &[1, 2];
    let mut out = vec![
        checks::hamiltonian_morphism(ns, fault),
        checks::divergence_and_contact_form(ns),
        checks::killing_duality(ns),
        checks::generator_invariance_check(1),
        checks::casimir_diagonal(1, &ks, &deltas, dmax, seed),
        checks::casimir_forms(1, &ks, &deltas, dmax),
        checks::casimir_centrality(1, &ks, &deltas, dmax.min(3)),
        checks::commutation_law(1, 3, kmax, &deltas, 3),
        checks::decomposition(1, kmax.max(2), &third, 3, samples, seed),
        checks::eigenvalue_distinctness(1, 4, samples * 2, seed),
        checks::proof_constants(1, &[1, 2], &third),
        checks::casimir_matrix_roots(1, &[1, 2], &[int(1), third.clone()], 1),
        checks::relation_vs_eigenvalues(1, samples * 100, seed),
        checks::pair_injectivity(1, samples, seed),
        checks::kappa3_agreement(1, samples, seed),
    ];
    match level {
        Level::Fast => {
            out.push(checks::invariant_dimensions(1, 3));
            out.push(checks::same_weight_classification(1, &[(1, 1), (2, 0), (0, 1), (1, 2)], &third, 1));
        }
        Level::Full => {
            out.push(checks::invariant_dimensions(1, 4));
            out.push(checks::generator_invariance_check(2));
            out.push(checks::casimir_diagonal(2, &[0, 1, 2], std::slice::from_ref(&third), 2, seed));
            out.push(checks::same_weight_classification(
                1,
                &[(1, 1), (2, 1), (1, 2), (2, 2), (2, 0), (0, 1)],
                &third,
                2,
            ));
        }
    }
    SelftestReport { level, seed, fault, passed: out.iter().all(|c| c.passed), checks: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_is_localized() {
        let r = checks::hamiltonian_morphism(&[1], Some(Fault::ReebSignFlip));
        assert!(!r.passed);
        assert!(checks::hamiltonian_morphism(&[1], None).passed);
    }
}
