use std::process::{Command, Output};

use serde_json::Value;

fn pcontact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcontact")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = pcontact(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn verify_casimir_passes() {
    let (code, v) = report(&["verify-casimir", "--n", "1", "--k", "2", "--delta", "1/3", "--max-base-degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["verified"], true);
    assert_eq!(v["results"]["c"], "13/9");
    assert_eq!(v["results"]["counterexample"], Value::Null);
}

#[test]
fn verify_casimir_zero_weight() {
    let (code, v) = report(&["verify-casimir", "--k", "0", "--delta", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["eigenvalues"][0], "0");
}

#[test]
fn bad_rational_is_usage_error() {
    assert_eq!(pcontact(&["verify-casimir", "--k", "1", "--delta", "1/0"]).status.code(), Some(2));
    assert_eq!(pcontact(&["verify-casimir", "--k", "1", "--delta", "0.5"]).status.code(), Some(2));
}

#[test]
fn invariants_examples() {
    let (code, v) = report(&["invariants", "--k", "1", "--m", "0", "--l", "1", "--nu", "0", "--algebra", "affine"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["solver_dim"], 2);
    assert_eq!(v["results"]["match"], true);
    let (_, v) = report(&["invariants", "--k", "1", "--m", "0", "--l", "1", "--nu", "1/3"]);
    assert_eq!(v["results"]["solver_dim"], 0);
    let (_, v) = report(&["invariants", "--k", "1", "--m", "0", "--l", "1", "--nu", "0", "--algebra", "contact"]);
    assert_eq!(v["results"]["solver_dim"], 1);
}

#[test]
fn decompose_examples() {
    let (code, v) = report(&["decompose", "--k", "1", "--delta", "1", "--poly", "xi_t"]);
    assert_eq!(code, 0);
    let comps = v["results"]["components"].as_array().unwrap();
    assert!(comps[0]["T"]["terms"].as_array().unwrap().is_empty());
    assert_eq!(comps[1]["T"]["terms"][0]["coeff"], "1/4");
    let (_, v) = report(&["decompose", "--k", "1", "--delta", "1", "--poly", "0"]);
    for c in v["results"]["components"].as_array().unwrap() {
        assert!(c["T"]["terms"].as_array().unwrap().is_empty());
    }
    let out = pcontact(&["decompose", "--k", "1", "--delta", "0", "--poly", "xi_t"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p = 0"));
}

#[test]
fn decompose_reads_json_file() {
    let dir = std::env::temp_dir().join(format!("pcontact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poly.json");
    std::fs::write(&path, r#"{"n":1,"blocks":["xi"],"terms":[{"coeff":"1","exp":{"p1":1,"xi_t":1}},{"coeff":"1","exp":{"xi_q1":1}}]}"#)
        .unwrap();
    let (code, v) = report(&["decompose", "--k", "1", "--delta", "1/3", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["results"]["components"][1]["T"]["terms"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn diophantine_examples() {
    let (code, v) = report(&["diophantine", "pairs", "--k", "1", "--kp", "1", "--delta", "1/3", "--deltap", "1/3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["pairs"], serde_json::json!([[0, 0], [1, 1]]));
    let code = pcontact(&["diophantine", "pairs", "--k", "1", "--kp", "1", "--delta", "0", "--deltap", "1/3"]).status.code();
    assert_eq!(code, Some(3));
    let (code, v) = report(&["diophantine", "kappa3", "--k", "3", "--kp", "2", "--blocks", "2,1;0,0;1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["kappa_analysis"]["verified"], true);
    let (_, v) = report(&["diophantine", "discriminant", "--k", "1", "--kp", "0", "--l", "1", "--lp", "0", "--delta", "1"]);
    assert_eq!(v["results"]["roots"], serde_json::json!(["0", "1"]));
    let (_, v) = report(&["diophantine", "kappa4", "--blocks", "2,1;0,0;1,1;0,0"]);
    assert_eq!(v["results"]["kappa_analysis"]["dependent"][0], serde_json::json!(["1", "0"]));
}

#[test]
fn classify_small() {
    let (code, v) = report(&["classify-same-weight", "--l", "1", "--k", "1", "--delta", "1/3", "--order-bound", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dimension"], 2);
    assert_eq!(v["results"]["predicted_basis"], serde_json::json!(["id", "X^1∘i_alpha^1"]));
}

#[test]
fn selftest_is_deterministic_and_catches_faults() {
    let a = pcontact(&["selftest", "--level", "fast", "--seed", "42"]);
    let b = pcontact(&["selftest", "--level", "fast", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (code, v) = report(&["selftest", "--inject-fault", "reeb-sign-flip"]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["hamiltonian_morphism"]);
}

#[test]
fn echoed_parameters_reproduce_the_report() {
    let (_, first) = report(&["verify-casimir", "--k", "1", "--delta", "-5/7", "--max-base-degree", "2", "--seed", "3"]);
    let p = &first["parameters"];
    let mut args = vec!["verify-casimir".to_string()];
    for (k, v) in p.as_object().unwrap() {
        args.push(format!("--{k}"));
        args.push(match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        });
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (_, second) = report(&args);
    assert_eq!(first, second);
}

#[test]
fn export_basis_and_text_format() {
    let (code, v) = report(&["export-basis", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dim"], 10);
    let out = pcontact(&["--format", "text", "diophantine", "pairs", "--k", "1", "--kp", "0", "--delta", "1", "--deltap", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("diophantine pairs: PASS"));
    assert!(text.contains("pairs: [[1,0]]"));
}
