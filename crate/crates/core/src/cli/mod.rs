//! Command-line interface. Exit codes: 0 success, 1 a check failed, 2 usage error.

mod verify;

use std::fmt::Write as _;
use std::io::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::criterion::{companion, predict};
use crate::error::Error;
use crate::fixtures::Fixtures;
use crate::latticesearch::{decompose_targets, enumerate_candidates, SearchConstraints};
use crate::lfun::{l_value, l_value_with_terms};
use crate::theta::TernaryForm;

pub use verify::{run_suite, Check, Suite, VerifySuiteResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "x049", version, about = "Rank criterion and modular form checks for X_0(49)")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict whether E(Q(sqrt d)) has positive rank (conditional on BSD).
    Criterion {
        #[arg(allow_hyphen_values = true)]
        d: i64,
        /// Add the companion discriminant, the weight 3/2 coefficient and its table L-value.
        #[arg(long)]
        explain: bool,
        /// With --explain, also compute L(F_d, 1) numerically.
        #[arg(long, requires = "explain")]
        lvalue: bool,
        #[arg(long)]
        json: bool,
    },
    /// Central value L(F_d, 1) of the twist by d.
    Lvalue {
        #[arg(allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Sum exactly this many terms instead of choosing from the tolerance.
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Theta series of the form with upper-triangle Gram entries a,b,c,d,e,f.
    Theta {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gram: Vec<i64>,
        #[arg(long)]
        limit: usize,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate Gram matrices of level 196 and character kernel 7 (JSON output).
    SearchMatrices {
        #[arg(long)]
        max_entry: i64,
        #[arg(long)]
        diagonal_only: bool,
        /// Also accept forms whose level is a proper divisor of 196.
        #[arg(long)]
        allow_lower_level: bool,
        /// Decompose this fixture in the theta span of the candidates.
        #[arg(long)]
        target: Option<Target>,
    },
    /// Run the reproduction checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Target {
    F1,
    F2,
    F3,
    G1,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::F1 => "f1",
            Target::F2 => "f2",
            Target::F3 => "f3",
            Target::G1 => "g1",
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    !matches!(e, Error::Inconsistent(_) | Error::FixtureMismatch { .. })
}

/// Exit code with the text for stdout and for stderr.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn ok(stdout: String) -> Outcome {
    Outcome { code: EXIT_OK, stdout, stderr: String::new() }
}

fn fail(e: Error) -> Outcome {
    let code = if is_usage_error(&e) { EXIT_USAGE } else { EXIT_CHECK_FAILED };
    Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

pub fn execute(command: Command) -> Outcome {
    match command {
        Command::Criterion { d, explain, lvalue, json } => criterion_cmd(d, explain, lvalue, json),
        Command::Lvalue { d, tol, terms, json } => {
            let result = match terms {
                Some(m) => l_value_with_terms(d, m),
                None => l_value(d, tol),
            };
            match result {
                Err(e) => fail(e),
                Ok(r) if json => ok(to_json(&r)),
                Ok(r) => {
                    let mut out = String::new();
                    writeln!(out, "d            {}", r.d).unwrap();
                    writeln!(out, "L(F_d, 1)    {:.12}", r.value).unwrap();
                    writeln!(out, "terms_used   {}", r.terms_used).unwrap();
                    writeln!(out, "tail_bound   {:e}", r.tail_bound).unwrap();
                    writeln!(out, "declared_zero {}", r.declared_zero).unwrap();
                    if let Some(reason) = &r.reason {
                        writeln!(out, "reason       {reason}").unwrap();
                    }
                    ok(out)
                }
            }
        }
        Command::Theta { gram, limit, json } => {
            let Ok(upper) = <[i64; 6]>::try_from(gram) else {
                return fail(Error::InvalidArgument("--gram takes six entries a,b,c,d,e,f".into()));
            };
            match TernaryForm::from_upper(upper) {
                Err(e) => fail(e),
                Ok(form) => {
                    let counts = form.theta_counts(limit);
                    let lc = form.level_and_character();
                    if json {
                        ok(to_json(&json!({
                            "gram": upper,
                            "level": lc.level,
                            "char_label": lc.char_label,
                            "squarefree_kernel": lc.squarefree_kernel,
                            "counts": counts,
                        })))
                    } else {
                        let mut out = String::new();
                        writeln!(out, "level {} character {} (kernel {})", lc.level, lc.char_label, lc.squarefree_kernel)
                            .unwrap();
                        writeln!(out, "{}", form.theta_series(limit)).unwrap();
                        ok(out)
                    }
                }
            }
        }
        Command::SearchMatrices { max_entry, diagonal_only, allow_lower_level, target } => {
            let constraints = SearchConstraints {
                max_entry,
                diagonal_only,
                exact_level: !allow_lower_level,
                ..SearchConstraints::default()
            };
            let found = match enumerate_candidates(&constraints) {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            let matrices: Vec<[i64; 6]> = found.iter().map(|f| f.upper()).collect();
            let mut out = json!({ "constraints": constraints, "count": matrices.len(), "matrices": matrices });
            if let Some(t) = target {
                let fx = Fixtures::bundled();
                let series = fx.series(t.name()).expect("bundled target");
                match decompose_targets(&[series], &found, 42) {
                    Err(e) => return fail(e),
                    Ok(sol) => {
                        out["target"] = json!(t.name());
                        out["decomposition"] = match &sol[0] {
                            None => serde_json::Value::Null,
                            Some(s) => json!({
                                "unique": s.unique,
                                "terms": s.coeffs.iter().enumerate()
                                    .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                                    .map(|(i, c)| json!({ "gram": matrices[i], "coeff": c.to_string() }))
                                    .collect::<Vec<_>>(),
                            }),
                        };
                    }
                }
            }
            ok(to_json(&out))
        }
        Command::Verify { suite, json } => {
            let results = run_suite(suite);
            let passed = results.iter().all(|r| r.passed());
            let text = if json {
                to_json(&results)
            } else {
                results.iter().map(|r| r.render()).collect()
            };
            Outcome {
                code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
                stdout: text,
                stderr: String::new(),
            }
        }
    }
}

fn criterion_cmd(d: i64, explain: bool, lvalue: bool, json: bool) -> Outcome {
    let report = match predict(d) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let mut value = serde_json::to_value(report.to_json()).expect("report serializes");
    if explain && report.reduced_d > 0 {
        let row = match companion(report.reduced_d) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        value["coefficient"] = json!(report.coefficient);
        value["form"] = json!(report.form_index.map(|i| format!("f{i}")));
        value["companion"] = json!(row);
        if lvalue {
            match l_value(report.reduced_d, 5e-5) {
                Ok(l) => value["l_value"] = json!(l),
                Err(e) => return fail(e),
            }
        }
    }
    if explain {
        value["reduction_trail"] = json!(report.reduction_trail);
    }
    if json {
        return ok(to_json(&value));
    }
    let mut out = String::new();
    let obj = value.as_object().expect("object");
    for (k, v) in obj {
        writeln!(out, "{k:<24} {v}").unwrap();
    }
    ok(out)
}

/// Parses `argv` and runs it; the return value is the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = execute(args.command);
    // a closed pipe on the reading side is not an error of ours
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    outcome.code
}
