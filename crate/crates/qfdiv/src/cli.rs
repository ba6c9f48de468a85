//! Command-line driver: divergence computation from matrix files, preserver
//! verification and falsification, and black-box operator recovery, with
//! seeded reproducibility and machine-readable reports.
//!
//! Reports are JSON by default: keys serialize in sorted order, finite values
//! are rounded to 12 significant digits, and `"inf"` stands in for +infinity,
//! so identical invocations emit byte-identical output. Text mode prints the
//! same data as `key: value` lines; `compute --breakdown` appends the
//! per-term table as CSV with columns `a,b,weight,contribution`.
//!
//! Exit codes: 0 when the property held or the expected outcome occurred,
//! 1 on an unexpected outcome, 2 on usage errors (bad flags, unknown labels,
//! unreadable or malformed matrix files).

use crate::divergence::{
    divergence_limit, divergence_spectral, divergence_spectral_with_breakdown,
    divergence_superoperator, DivergenceResult, EpsilonSchedule,
};
use crate::generator::{
    make_affine, make_entropy, make_exp_decreasing, make_sqrt_deviation, make_tsallis,
    ExtendedReal, GeneratorFunction,
};
use crate::linalg::{load_hermitian, random_unitary, CMatrix, PsdOperator};
use crate::preserver::{check_preservation, falsify, recover_operator, PairSampler, TransformSpec};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;

/// Seed used when none is given, fixed so reruns reproduce reports exactly.
pub const DEFAULT_SEED: u64 = 1_234_567_891_011;

#[derive(Parser, Debug)]
#[command(
    name = "qfdiv",
    version,
    about = "Quantum f-divergences of PSD operators and their preservers"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    /// Double sum over eigenpairs weighted by squared overlaps.
    Spectral,
    /// Operator-function route through the compressed quotient.
    Superop,
    /// Extrapolated limit of S_f(A‖B + eps I) along a decade schedule.
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute S_f(A‖B) from two matrix files.
    Compute {
        /// Generator label: entropy, tsallis:<q>, sqrt-dev, affine:<alpha>:<beta>, exp-dec.
        #[arg(long = "f")]
        generator: String,
        /// Left operator, matrix JSON {"dim": n, "re": [[..]], "im": [[..]]}.
        #[arg(long)]
        a: PathBuf,
        /// Right operator, same format.
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Spectral)]
        route: RouteArg,
        /// Also report every nonzero spectral term (spectral route only).
        #[arg(long)]
        breakdown: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Stress-test whether a transform preserves the divergence on a seeded pair mix.
    Verify {
        /// Generator label: entropy, tsallis:<q>, sqrt-dev, affine:<alpha>:<beta>, exp-dec.
        #[arg(long = "f")]
        generator: String,
        /// Transform label: unitary:<seed>, antiunitary:<seed>, pinching, averaging, transpose.
        #[arg(long)]
        transform: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reconstruct the (anti)unitary behind a black-box preserver.
    Recover {
        /// Map label: unitary:<seed>, antiunitary:<seed>, transpose.
        #[arg(long)]
        phi: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search for a pair on which a transform measurably changes the divergence.
    Falsify {
        /// Generator label: entropy, tsallis:<q>, sqrt-dev, affine:<alpha>:<beta>, exp-dec.
        #[arg(long = "f")]
        generator: String,
        /// Transform label: unitary:<seed>, antiunitary:<seed>, pinching, averaging, transpose.
        #[arg(long)]
        transform: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Parses a generator label into the generator it names.
pub fn parse_generator(label: &str) -> Result<GeneratorFunction> {
    match label {
        "entropy" => return Ok(make_entropy()),
        "sqrt-dev" => return Ok(make_sqrt_deviation()),
        "exp-dec" => return Ok(make_exp_decreasing()),
        _ => {}
    }
    if let Some(q) = label.strip_prefix("tsallis:") {
        let q: f64 = q.parse().map_err(|_| Error::InvalidParameter {
            reason: format!("cannot parse the order in '{label}'"),
        })?;
        return make_tsallis(q);
    }
    if let Some(rest) = label.strip_prefix("affine:") {
        let mut parts = rest.splitn(2, ':');
        let alpha = parts.next().unwrap_or("");
        let beta = parts.next().ok_or_else(|| Error::InvalidParameter {
            reason: format!("'{label}' needs two parameters, affine:<alpha>:<beta>"),
        })?;
        let alpha: f64 = alpha.parse().map_err(|_| Error::InvalidParameter {
            reason: format!("cannot parse alpha in '{label}'"),
        })?;
        let beta: f64 = beta.parse().map_err(|_| Error::InvalidParameter {
            reason: format!("cannot parse beta in '{label}'"),
        })?;
        return make_affine(alpha, beta);
    }
    Err(Error::InvalidParameter {
        reason: format!(
            "unknown generator '{label}'; known labels: entropy, tsallis:<q>, \
             sqrt-dev, affine:<alpha>:<beta>, exp-dec"
        ),
    })
}

fn parse_label_seed(label: &str, digits: &str) -> Result<u64> {
    digits.parse().map_err(|_| Error::InvalidParameter {
        reason: format!("cannot parse the seed in '{label}'"),
    })
}

/// Parses a transform label into its spec, plus whether it is a conjugation
/// and therefore expected to preserve divergences.
pub fn parse_transform(label: &str, dim: usize) -> Result<(TransformSpec, bool)> {
    if let Some(digits) = label.strip_prefix("unitary:") {
        let seed = parse_label_seed(label, digits)?;
        return Ok((TransformSpec::unitary(random_unitary(dim, seed)?), true));
    }
    if let Some(digits) = label.strip_prefix("antiunitary:") {
        let seed = parse_label_seed(label, digits)?;
        return Ok((TransformSpec::antiunitary(random_unitary(dim, seed)?), true));
    }
    match label {
        "transpose" => Ok((TransformSpec::transpose(), true)),
        "pinching" => Ok((TransformSpec::pinching(), false)),
        "averaging" => Ok((TransformSpec::averaging(), false)),
        _ => Err(Error::InvalidParameter {
            reason: format!(
                "unknown transform '{label}'; known labels: unitary:<seed>, \
                 antiunitary:<seed>, pinching, averaging, transpose"
            ),
        }),
    }
}

/// Rounds to 12 significant digits, the report precision.
fn sig12(x: f64) -> f64 {
    format!("{x:.11e}")
        .parse()
        .expect("formatted float reparses")
}

/// A finite value as a rounded JSON number, anything else as the string "inf".
fn number_or_inf(x: f64) -> Value {
    if x.is_finite() {
        json!(sig12(x))
    } else {
        Value::String("inf".into())
    }
}

fn extended(v: ExtendedReal) -> Value {
    match v.value() {
        Some(x) => number_or_inf(x),
        None => Value::String("inf".into()),
    }
}

fn text_number(x: f64) -> String {
    if x.is_finite() {
        format!("{}", sig12(x))
    } else {
        "inf".into()
    }
}

fn matrix_value(m: &CMatrix) -> Value {
    let n = m.dim();
    let grid = |pick: fn(&num_complex::Complex<f64>) -> f64| -> Value {
        Value::Array(
            (0..n)
                .map(|i| Value::Array((0..n).map(|j| number_or_inf(pick(&m.get(i, j)))).collect()))
                .collect(),
        )
    };
    json!({ "dim": n, "im": grid(|z| z.im), "re": grid(|z| z.re) })
}

fn breakdown_csv(result: &DivergenceResult) -> Option<String> {
    let terms = result.terms_breakdown.as_ref()?;
    let mut out = String::from("a,b,weight,contribution\n");
    for t in terms {
        let contribution = match t.contribution.value() {
            Some(x) => text_number(x),
            None => "inf".into(),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            text_number(t.a),
            text_number(t.b),
            text_number(t.weight),
            contribution
        ));
    }
    Some(out)
}

/// Prints a report. JSON is a single compact line with sorted keys; text
/// mode prints one `key: value` line per field, skipping the term array in
/// favor of the CSV table that follows it.
fn emit(format: Format, report: &Value, csv: Option<&str>) {
    match format {
        Format::Json => println!("{report}"),
        Format::Text => {
            if let Value::Object(map) = report {
                for (k, v) in map {
                    if k == "terms" {
                        continue;
                    }
                    match v {
                        Value::String(s) => println!("{k}: {s}"),
                        other => println!("{k}: {other}"),
                    }
                }
            }
            if let Some(table) = csv {
                println!();
                print!("{table}");
            }
        }
    }
}

/// Usage-class failures (bad arguments, unreadable or malformed inputs) exit
/// with 2; anything that went wrong while computing exits with 1.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::MatrixFormat { .. }
        | Error::NotHermitian { .. }
        | Error::NotPositiveSemidefinite { .. }
        | Error::NonFiniteEntry { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidRank { .. }
        | Error::InvalidParameter { .. } => 2,
        _ => 1,
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Compute {
            generator,
            a,
            b,
            route,
            breakdown,
            format,
        } => {
            let f = parse_generator(&generator)?;
            if breakdown && route != RouteArg::Spectral {
                return Err(Error::InvalidParameter {
                    reason: "term breakdown is only available on the spectral route".into(),
                });
            }
            let a = PsdOperator::new(load_hermitian(&a)?)?;
            let b = PsdOperator::new(load_hermitian(&b)?)?;
            let result = match route {
                RouteArg::Spectral => {
                    if breakdown {
                        divergence_spectral_with_breakdown(&a, &b, &f)?
                    } else {
                        divergence_spectral(&a, &b, &f)?
                    }
                }
                RouteArg::Superop => divergence_superoperator(&a, &b, &f)?,
                RouteArg::Limit => divergence_limit(&a, &b, &f, &EpsilonSchedule::default())?.0,
            };
            let mut report = json!({
                "command": "compute",
                "generator": f.name(),
                "route": result.route.label(),
                "support_violated": result.support_violated,
                "value": extended(result.value),
            });
            if let Some(terms) = &result.terms_breakdown {
                report["terms"] = Value::Array(
                    terms
                        .iter()
                        .map(|t| {
                            json!({
                                "a": number_or_inf(t.a),
                                "b": number_or_inf(t.b),
                                "contribution": extended(t.contribution),
                                "weight": number_or_inf(t.weight),
                            })
                        })
                        .collect(),
                );
            }
            emit(format, &report, breakdown_csv(&result).as_deref());
            Ok(0)
        }
        Command::Verify {
            generator,
            transform,
            dim,
            trials,
            tol,
            seed,
            format,
        } => {
            let f = parse_generator(&generator)?;
            let (t, _) = parse_transform(&transform, dim)?;
            let sampler = PairSampler::new(dim, seed)?;
            let outcome = check_preservation(&t, &f, &sampler, trials, tol)?;
            let held = outcome.max_abs_deviation <= tol;
            let report = json!({
                "command": "verify",
                "deviation": number_or_inf(outcome.max_abs_deviation),
                "dim": dim,
                "generator": f.name(),
                "held": held,
                "infinite_mismatches": outcome.infinite_mismatches,
                "seed": seed,
                "tol": number_or_inf(tol),
                "transform": transform,
                "trials": outcome.trials,
                "violations": outcome.violations,
                "worst_pair": outcome
                    .worst_pair
                    .map(|(x, y)| json!([x, y]))
                    .unwrap_or(Value::Null),
            });
            emit(format, &report, None);
            Ok(if held { 0 } else { 1 })
        }
        Command::Recover {
            phi,
            dim,
            seed,
            format,
        } => {
            let (t, _) = parse_transform(&phi, dim)?;
            let rec = recover_operator(|x| t.apply(x), dim)?;
            let report = json!({
                "command": "recover",
                "dim": dim,
                "kind": rec.kind.label(),
                "operator": matrix_value(rec.u_hat.matrix()),
                "phi": phi,
                "residuals": {
                    "action": number_or_inf(rec.action_residual),
                    "unitarity": number_or_inf(rec.unitarity_residual),
                },
                "seed": seed,
            });
            emit(format, &report, None);
            Ok(0)
        }
        Command::Falsify {
            generator,
            transform,
            dim,
            budget,
            threshold,
            seed,
            format,
        } => {
            let f = parse_generator(&generator)?;
            let (t, is_conjugation) = parse_transform(&transform, dim)?;
            let sampler = PairSampler::new(dim, seed)?;
            let witness = falsify(&t, &f, &sampler, budget, threshold)?;
            let as_expected = witness.is_some() != is_conjugation;
            let witness_value = witness
                .as_ref()
                .map(|w| {
                    json!({
                        "after": extended(w.after),
                        "before": extended(w.before),
                        "deviation": number_or_inf(w.deviation),
                        "pair": [w.pair.0, w.pair.1],
                        "trial": w.trial,
                    })
                })
                .unwrap_or(Value::Null);
            let report = json!({
                "as_expected": as_expected,
                "budget": budget,
                "command": "falsify",
                "dim": dim,
                "generator": f.name(),
                "seed": seed,
                "threshold": number_or_inf(threshold),
                "transform": transform,
                "witness": witness_value,
            });
            emit(format, &report, None);
            Ok(if as_expected { 0 } else { 1 })
        }
    }
}

/// Parses arguments and runs the selected command, returning the process
/// exit code. Clap-level failures (unknown flags, missing values, help and
/// version requests) are printed by clap itself.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_labels_round_trip_and_reject_bad_parameters() {
        for (label, zero) in [
            ("entropy", 0.0),
            ("sqrt-dev", 1.0),
            ("exp-dec", std::f64::consts::E - 1.0),
            ("tsallis:0.5", 0.0),
            ("affine:2:3", 3.0),
        ] {
            let f = parse_generator(label).unwrap();
            assert!((f.value_at_zero() - zero).abs() <= 1e-15, "{label}");
        }
        assert_eq!(
            parse_generator("tsallis:0.5").unwrap().name(),
            "tsallis:0.5"
        );

        assert!(parse_generator("tsallis:1").is_err(), "order 1 is excluded");
        assert!(parse_generator("tsallis:x").is_err());
        assert!(
            parse_generator("affine:1").is_err(),
            "needs both parameters"
        );
        let err = parse_generator("renyi").unwrap_err();
        assert!(err.to_string().contains("entropy"), "lists known labels");
    }

    #[test]
    fn transform_labels_carry_their_conjugation_flag() {
        for (label, conjugation) in [
            ("unitary:7", true),
            ("antiunitary:7", true),
            ("transpose", true),
            ("pinching", false),
            ("averaging", false),
        ] {
            let (t, flag) = parse_transform(label, 3).unwrap();
            assert_eq!(flag, conjugation, "{label}");
            let a = PsdOperator::identity(3);
            assert_eq!(t.apply(&a).unwrap().dim(), 3);
        }
        assert!(parse_transform("unitary:", 2).is_err());
        assert!(parse_transform("swap", 2).is_err());
    }

    #[test]
    fn report_values_round_to_twelve_significant_digits() {
        assert_eq!(sig12(2.0f64.ln() * 2.0).to_string(), "1.38629436112");
        assert_eq!(sig12(0.0).to_string(), "0");
        assert_eq!(number_or_inf(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(
            extended(ExtendedReal::PosInfinity),
            Value::String("inf".into())
        );
        assert_eq!(text_number(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn clap_parsing_accepts_the_documented_grammar() {
        let cli = Cli::try_parse_from([
            "qfdiv", "compute", "--f", "entropy", "--a", "a.json", "--b", "b.json", "--route",
            "superop",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Command::Compute {
                route: RouteArg::Superop,
                breakdown: false,
                ..
            }
        ));

        let cli = Cli::try_parse_from([
            "qfdiv",
            "verify",
            "--f",
            "sqrt-dev",
            "--transform",
            "unitary:3",
            "--dim",
            "4",
            "--trials",
            "50",
            "--tol",
            "1e-9",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Command::Verify {
                dim: 4,
                trials: 50,
                seed: DEFAULT_SEED,
                ..
            }
        ));

        assert!(Cli::try_parse_from(["qfdiv", "compute", "--f", "entropy"]).is_err());
        assert!(Cli::try_parse_from(["qfdiv", "observe"]).is_err());
    }
}
