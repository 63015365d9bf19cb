use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use pcontact::algebra::json::{poly_from_text, PolyJson};
use pcontact::algebra::{fmt_rational, parse_rational, Rational, VarTable};
use pcontact::casimir::{assemble_casimir, eigenvalues, verify_diagonal_form, CasimirForm};
use pcontact::checks::{self, Fault};
use pcontact::contact::sp_basis;
use pcontact::diophantine::{admissible_pairs, discriminant_analysis, kappa3_delta, kappa4_consistency};
use pcontact::equivariant::{check_noncritical, classification_json, classify_same_weight, decompose, decomposition_json};
use pcontact::invariants::{invariant_report, Algebra, InvariantQuery};
use pcontact::selftest::{run_selftest, Level};
use pcontact::symbols::{Module, SymbolElem};
use pcontact::Error;

const EXIT_PROPERTY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(name = "pcontact", version, about = "Exact verification of projectively equivariant symbol calculus on contact manifolds")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    Affine,
    Contact,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    ReebSignFlip,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Block list written as `"l,l';l,l';..."`.
#[derive(Clone, Debug)]
struct Blocks(Vec<(u32, u32)>);

fn blocks(s: &str) -> Result<Blocks, String> {
    s.split(';')
        .map(|b| {
            let (a, c) = b.split_once(',').ok_or_else(|| format!("block `{b}` is not `l,l'`"))?;
            let p = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("block `{b}`: {e}"));
            Ok((p(a)?, p(c)?))
        })
        .collect::<Result<_, String>>()
        .map(Blocks)
}

#[derive(Subcommand)]
enum Command {
    /// Compare the assembled Casimir on R^k_delta with its closed diagonal form.
    VerifyCasimir {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        delta: Rational,
        #[arg(long, default_value_t = 4)]
        max_base_degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dimension of the invariant subspace of S^{k,m}_{l;nu}.
    Invariants {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        nu: Rational,
        #[arg(long, value_enum, default_value_t = AlgebraArg::Affine)]
        algebra: AlgebraArg,
        /// Base-degree bound of the ansatz (default l + min(k,m) + 1).
        #[arg(long)]
        xdeg: Option<u32>,
    },
    /// Split an element of R^k_delta into Casimir eigencomponents.
    Decompose {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        delta: Rational,
        /// File holding a polynomial, as JSON or in the printed text form.
        #[arg(long, conflicts_with = "poly")]
        input: Option<PathBuf>,
        /// Inline polynomial in the printed text form.
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
    },
    /// Solve for all invariant operators R^l_delta -> R^k_delta in a bounded ansatz.
    ClassifySameWeight {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        delta: Rational,
        #[arg(long, default_value_t = 2)]
        order_bound: u32,
        #[arg(long)]
        coeff_degree: Option<u32>,
    },
    /// Eigenvalue matching between modules of different weights.
    #[command(subcommand)]
    Diophantine(Dio),
    /// Run the property suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Deliberately break one ingredient to check that failures are caught.
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
    /// Print the sp(2n+2) basis with Hamiltonians, fields and dual elements.
    ExportBasis {
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Dio {
    /// All block pairs (l, l') with equal eigenvalues.
    Pairs {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        kp: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        delta: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        deltap: Rational,
    },
    /// The matching equation as a quadratic in delta'.
    Discriminant {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        kp: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        lp: u32,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        delta: Rational,
    },
    /// Weights forced by three matching blocks.
    Kappa3 {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        kp: u32,
        /// Three blocks as "l,l';l,l';l,l'".
        #[arg(long, value_parser = blocks)]
        blocks: Blocks,
    },
    /// Dependence of four or more matching blocks.
    Kappa4 {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_parser = blocks)]
        blocks: Blocks,
    },
}

struct Report {
    command: &'static str,
    parameters: Value,
    results: Value,
    passed: bool,
}

impl Report {
    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "passed": self.passed,
        })
    }

    fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.passed { "PASS" } else { "FAIL" });
        if let Value::Object(p) = &self.parameters {
            let ps: Vec<String> = p.iter().map(|(k, v)| format!("{k}={}", plain(v))).collect();
            out.push_str(&format!("parameters: {}\n", ps.join(" ")));
        }
        match &self.results {
            Value::Object(r) => {
                for (k, v) in r {
                    out.push_str(&format!("{k}: {}\n", plain(v)));
                }
            }
            other => out.push_str(&format!("{}\n", plain(other))),
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse(_) | Error::UnknownVariable(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

fn r(x: &Rational) -> Value {
    Value::String(fmt_rational(x))
}

fn read_symbol(n: usize, k: u32, delta: &Rational, input: Option<PathBuf>, poly: Option<String>) -> Result<SymbolElem, Failure> {
    let table = VarTable::with_xi(n);
    let text = match (input, poly) {
        (Some(path), _) => fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        (None, Some(p)) => p,
        (None, None) => return Err(Failure::Usage("one of --input or --poly is required".into())),
    };
    let trimmed = text.trim();
    let p = if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| Failure::Usage(e.to_string()))?;
        let body = if v.get("module").is_some() { v["poly"].clone() } else { v };
        let doc: PolyJson = serde_json::from_value(body).map_err(|e| Failure::Usage(e.to_string()))?;
        doc.to_poly_in(&table)?
    } else {
        poly_from_text(&table, trimmed)?
    };
    Ok(SymbolElem::new(p, Module::r(k, delta.clone()))?)
}

fn execute(command: Command) -> Result<Report, Failure> {
    Ok(match command {
        Command::VerifyCasimir { n, k, delta, max_base_degree, seed } => {
            let critical = check_noncritical(&delta, k, n).is_err();
            if critical {
                eprintln!("warning: delta = {} is critical for k = {k}; decomposition checks skipped", fmt_rational(&delta));
            }
            let res = verify_diagonal_form(n, k, &delta, max_base_degree, seed)?;
            let table = VarTable::with_xi(n);
            let family = pcontact::equivariant::symbol_monomials(&table, k, max_base_degree.min(3));
            let forms = pcontact::casimir::first_disagreement(
                &res.assembled,
                &assemble_casimir(n, k, &delta, CasimirForm::EqCasimir2)?,
                &family,
            )
            .is_none();
            let decomposition = (!critical && k > 0)
                .then(|| checks::decomposition(n, k, &delta, max_base_degree.min(2), 5, seed).passed);
            let mut results = res.to_json();
            results["forms_agree"] = json!(forms);
            results["decomposition_checks"] = match decomposition {
                Some(b) => json!(b),
                None => json!("skipped"),
            };
            Report {
                command: "verify-casimir",
                parameters: json!({"n": n, "k": k, "delta": r(&delta), "max-base-degree": max_base_degree, "seed": seed}),
                passed: res.verified && forms && decomposition.unwrap_or(true),
                results,
            }
        }
        Command::Invariants { n, k, m, l, nu, algebra, xdeg } => {
            let alg = match algebra {
                AlgebraArg::Affine => Algebra::AffineContact,
                AlgebraArg::Contact => Algebra::FullSp,
            };
            let mut q = InvariantQuery::new(n, k, m, l, nu.clone(), alg);
            if let Some(b) = xdeg {
                q = q.with_bound(b);
            }
            let rep = invariant_report(&q)?;
            Report {
                command: "invariants",
                parameters: json!({
                    "n": n, "k": k, "m": m, "l": l, "nu": r(&nu),
                    "algebra": match algebra { AlgebraArg::Affine => "affine", AlgebraArg::Contact => "contact" },
                    "xdeg": q.x_degree_bound,
                }),
                passed: rep.matches && rep.classical_spans,
                results: rep.to_json(),
            }
        }
        Command::Decompose { n, k, delta, input, poly } => {
            let source = input.as_ref().map(|p| p.display().to_string());
            let s = read_symbol(n, k, &delta, input, poly.clone())?;
            let dec = decompose(&s)?;
            let eig = eigenvalues(n, k, &delta);
            let reconstructed = dec.reconstruct() == s.poly;
            let casimir = assemble_casimir(n, k, &delta, CasimirForm::DualSum)?;
            let eigen_ok = dec.lifted.iter().zip(&eig).all(|(x, e)| casimir.apply(&x.poly) == x.poly.scale(e));
            let mut results = decomposition_json(&dec, &eig, reconstructed);
            results["eigenvectors_ok"] = json!(eigen_ok);
            let mut params = Map::new();
            params.insert("n".into(), json!(n));
            params.insert("k".into(), json!(k));
            params.insert("delta".into(), r(&delta));
            match (source, poly) {
                (Some(path), _) => params.insert("input".into(), json!(path)),
                (None, p) => params.insert("poly".into(), json!(p)),
            };
            Report { command: "decompose", parameters: Value::Object(params), passed: reconstructed && eigen_ok, results }
        }
        Command::ClassifySameWeight { n, l, k, delta, order_bound, coeff_degree } => {
            let c = classify_same_weight(n, l, k, &delta, order_bound, coeff_degree)?;
            Report {
                command: "classify-same-weight",
                parameters: json!({
                    "n": n, "l": l, "k": k, "delta": r(&delta),
                    "order-bound": order_bound, "coeff-degree": c.coeff_degree_bound,
                }),
                passed: c.dimension == c.predicted && c.spans_match && c.basis_intertwines,
                results: classification_json(&c),
            }
        }
        Command::Diophantine(d) => diophantine(d)?,
        Command::Selftest { level, seed, inject_fault } => {
            let lvl = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let fault = inject_fault.map(|_| Fault::ReebSignFlip);
            let rep = run_selftest(lvl, seed, fault);
            if let Some(f) = rep.first_failure() {
                eprintln!("first failure: {} ({})", f.name, f.counterexample.clone().unwrap_or_default());
            }
            Report {
                command: "selftest",
                parameters: json!({
                    "level": match level { LevelArg::Fast => "fast", LevelArg::Full => "full" },
                    "seed": seed,
                    "inject-fault": inject_fault.map(|_| "reeb-sign-flip"),
                }),
                passed: rep.passed,
                results: serde_json::to_value(&rep).expect("serializable"),
            }
        }
        Command::ExportBasis { n } => {
            let b = sp_basis(n)?;
            Report { command: "export-basis", parameters: json!({"n": n}), passed: true, results: b.export_json() }
        }
    })
}

fn diophantine(d: Dio) -> Result<Report, Failure> {
    Ok(match d {
        Dio::Pairs { n, k, kp, delta, deltap } => {
            let p = admissible_pairs(n, k, kp, &delta, &deltap)?;
            let instance = json!({"n": n, "k": k, "kp": kp, "delta": r(&delta), "deltap": r(&deltap)});
            Report {
                command: "diophantine pairs",
                parameters: instance.clone(),
                passed: p.functional && p.injective,
                results: json!({
                    "instance": instance,
                    "pairs": p.pairs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
                    "functional": p.functional,
                    "injective": p.injective,
                }),
            }
        }
        Dio::Discriminant { n, k, kp, l, lp, delta } => {
            let res = discriminant_analysis(n, k, kp, l, lp, &delta);
            Report {
                command: "diophantine discriminant",
                parameters: json!({"n": n, "k": k, "kp": kp, "l": l, "lp": lp, "delta": r(&delta)}),
                passed: true,
                results: res.to_json(),
            }
        }
        Dio::Kappa3 { n, k, kp, blocks } => {
            let blocks = blocks_flat(blocks)?;
            let res = kappa3_delta(n, k, kp, &blocks)?;
            Report {
                command: "diophantine kappa3",
                parameters: json!({"n": n, "k": k, "kp": kp, "blocks": blocks_text(&blocks)}),
                passed: res.verified,
                results: json!({"kappa_analysis": res.to_json()}),
            }
        }
        Dio::Kappa4 { n, blocks } => {
            let blocks = blocks_flat(blocks)?;
            let res = kappa4_consistency(n, &blocks)?;
            Report {
                command: "diophantine kappa4",
                parameters: json!({"n": n, "blocks": blocks_text(&blocks)}),
                passed: true,
                results: json!({"kappa_analysis": res.to_json()}),
            }
        }
    })
}

fn blocks_flat(b: Blocks) -> Result<Vec<(u32, u32)>, Failure> {
    if b.0.is_empty() {
        return Err(Failure::Usage("no blocks given".into()));
    }
    Ok(b.0)
}

fn blocks_text(b: &[(u32, u32)]) -> String {
    b.iter().map(|(x, y)| format!("{x},{y}")).collect::<Vec<_>>().join(";")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DOMAIN);
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("serializable") + "\n",
        Format::Text => report.to_text(),
    };
    match cli.output {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_PROPERTY)
    }
}
