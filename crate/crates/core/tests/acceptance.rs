//! Acceptance suite: every criterion at zero tolerance, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use pcontact::algebra::{int, rat, Rational};
use pcontact::checks::{self, CheckOutcome};

const SEED: u64 = 20_240_917;

fn deltas() -> Vec<Rational> {
    vec![rat(1, 3), rat(-5, 7), int(2)]
}

fn all(parts: Vec<CheckOutcome>) -> (bool, String) {
    let ok = parts.iter().all(|p| p.passed);
    let mut msg: Vec<String> = parts
        .iter()
        .map(|p| format!("{}: {} cases{}", p.name, p.cases, if p.detail.is_empty() { String::new() } else { format!(" ({})", p.detail) }))
        .collect();
    for p in parts.iter().filter(|p| !p.passed) {
        msg.push(format!("counterexample in {}: {}", p.name, p.counterexample.clone().unwrap_or_default()));
    }
    (ok, msg.join("; "))
}

fn criterion(id: usize, name: &str, f: impl FnOnce() -> (bool, String)) -> bool {
    let start = Instant::now();
    let (ok, msg) = f();
    println!(
        "criterion {id:>2} {name}: {} [{:.1}s] {msg}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    ok
}

fn main() -> ExitCode {
    let d = deltas();
    let third = rat(1, 3);
    let results = [
        criterion(1, "casimir diagonal form", || {
            all(vec![
                checks::casimir_diagonal(1, &[0, 1, 2, 3], &d, 4, SEED),
                checks::casimir_diagonal(2, &[0, 1, 2], std::slice::from_ref(&third), 2, SEED),
            ])
        }),
        criterion(2, "assembly equivalence", || all(vec![checks::casimir_forms(1, &[0, 1, 2, 3], &d, 4)])),
        criterion(3, "commutation law", || all(vec![checks::commutation_law(1, 3, 3, &d, 3)])),
        criterion(4, "decomposition", || {
            all(vec![
                checks::decomposition(1, 3, &third, 3, 100, SEED),
                checks::casimir_centrality(1, &[0, 1, 2, 3], &d, 3),
            ])
        }),
        criterion(5, "eigenvalue distinctness", || all(vec![checks::eigenvalue_distinctness(1, 4, 200, SEED)])),
        criterion(6, "invariant dimensions", || all(vec![checks::invariant_dimensions(1, 4)])),
        criterion(7, "generator invariance", || {
            all(vec![checks::generator_invariance_check(1), checks::generator_invariance_check(2)])
        }),
        criterion(8, "same-weight classification", || {
            all(vec![checks::same_weight_classification(
                1,
                &[(1, 1), (2, 1), (1, 2), (2, 2), (2, 0), (0, 1)],
                &third,
                2,
            )])
        }),
        criterion(9, "hamiltonian morphism", || {
            all(vec![checks::hamiltonian_morphism(&[1, 2], None), checks::divergence_and_contact_form(&[1, 2])])
        }),
        criterion(10, "killing duality", || all(vec![checks::killing_duality(&[1, 2])])),
        criterion(11, "diophantine layer", || {
            all(vec![
                checks::relation_vs_eigenvalues(1, 10_000, SEED),
                checks::pair_injectivity(1, 100, SEED),
                checks::kappa3_agreement(1, 100, SEED),
            ])
        }),
        criterion(12, "proof constants", || {
            all(vec![
                checks::proof_constants(1, &[1, 2], &third),
                checks::casimir_matrix_roots(1, &[1, 2], &[int(1), third.clone()], 1),
            ])
        }),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
