//! Command-line front end: loads instances, dispatches to the library, and
//! emits JSON or CSV reports with deterministic formatting.
//!
//! Exit codes: 0 on success, 1 on domain errors (out-of-range radii and the
//! like, reported as machine-readable JSON), 2 on I/O, schema or usage errors.

// `!(x > y)` guards reject NaN flag values; `x <= y` would let them through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spheremax::{
    audit_curve, counterexample_l2, counterexample_r2, diagnose_boundary, eta_curve, g_value,
    sample_curve, spectral_resolvent, wellposedness_check, Error, Instance,
};

#[derive(Parser)]
#[command(
    name = "spheremax",
    about = "Resolvent curves, boundary diagnosis and sphere-constrained maximization for symmetric operators",
    version
)]
struct Cli {
    /// Instance JSON file ({"dim": n, "T": [[..],..], "z": [..]}); for
    /// `dirichlet --phi file` it holds the source samples instead.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Report format; csv is available for the tabular commands
    /// (eig, g-curve, curve, dirichlet).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized restarts and sampling; fixed seeds give
    /// byte-identical reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and operator norm of the instance.
    Eig,
    /// Solve T x - lambda x = z for one lambda above the operator norm.
    Resolve {
        #[arg(long)]
        lambda: f64,
    },
    /// Sample g(lambda) = ||v_lambda||^2 on a geometric lambda grid.
    GCurve {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Classify the boundary equation T x - ||T|| x = z and report theta.
    Diagnose,
    /// Maximize J over the sphere ||x||^2 = r.
    Max {
        #[arg(long)]
        r: f64,
    },
    /// Audit the quadratic-growth identity at radius r with sphere samples.
    Wellposed {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Sample the value curve gamma on a radius grid inside ]0, theta[.
    Curve {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Sample the value curve and evaluate the audit predicates.
    Audit {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Run a counterexample report (r2: non-symmetric map; l2: truncated
    /// shift operator, both z placements side by side).
    Counterexample {
        #[arg(value_enum)]
        which: Which,
        /// Truncation dimension for l2.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Discrete Dirichlet curve suite on n interior grid points.
    Dirichlet {
        #[arg(long, default_value_t = 49)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Phi::One)]
        phi: Phi,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 20.0)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    R2,
    L2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Phi {
    /// Constant source phi = 1.
    One,
    /// First discrete eigenfunction sin(pi x).
    Eig1,
    /// Second discrete eigenfunction sin(2 pi x).
    Eig2,
    /// Samples from the --input file (JSON array or {"phi": [..]}).
    File,
}

enum Failure {
    Domain(Error),
    Input(Error),
    Io(String),
    Usage(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Input(_) | Failure::Io(_) | Failure::Usage(_) => 2,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) | Failure::Input(e) => error_json(e),
            Failure::Io(message) => json!({"error": "Io", "message": message}),
            Failure::Usage(message) => json!({"error": "Usage", "message": message}),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e)
        } else {
            Failure::Domain(e)
        }
    }
}

fn error_json(e: &Error) -> Value {
    let message = e.to_string();
    match e {
        Error::Schema(_) => json!({"error": "SchemaError", "message": message}),
        Error::AsymmetricOperator { row, col, .. } => {
            json!({"error": "AsymmetricOperator", "message": message, "row": row, "col": col})
        }
        Error::ZeroZ => json!({"error": "ZeroZ", "message": message}),
        Error::OutOfRange { r, theta } => {
            json!({"error": "OutOfRange", "message": message, "r": r, "theta": finite_or_inf(*theta)})
        }
        Error::NonPositiveRadius { r } => {
            json!({"error": "NonPositiveRadius", "message": message, "r": r})
        }
        Error::LambdaTooSmall { lambda, op_norm } => {
            json!({"error": "LambdaTooSmall", "message": message, "lambda": lambda, "op_norm": op_norm})
        }
        Error::MuAtEigenvalue { mu, eigenvalue } => {
            json!({"error": "MuAtEigenvalue", "message": message, "mu": mu, "eigenvalue": eigenvalue})
        }
        Error::MuOutOfRange { mu, min, max } => {
            json!({"error": "MuOutOfRange", "message": message, "mu": mu, "min": min, "max": finite_or_inf(*max)})
        }
        _ => json!({"error": variant_name(e), "message": message}),
    }
}

fn variant_name(e: &Error) -> &'static str {
    match e {
        Error::Schema(_) => "SchemaError",
        Error::NotSquare { .. } => "NotSquare",
        Error::AsymmetricOperator { .. } => "AsymmetricOperator",
        Error::ZeroZ => "ZeroZ",
        Error::NonFinite { .. } => "NonFinite",
        Error::EmptyVector => "EmptyVector",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::EigenNonConvergence { .. } => "EigenNonConvergence",
        Error::LambdaTooSmall { .. } => "LambdaTooSmall",
        Error::IterationCapExceeded { .. } => "IterationCapExceeded",
        Error::MuAtEigenvalue { .. } => "MuAtEigenvalue",
        Error::MuOutOfRange { .. } => "MuOutOfRange",
        Error::NonPositiveRadius { .. } => "NonPositiveRadius",
        Error::OutOfRange { .. } => "OutOfRange",
        Error::TooFewSamples { .. } => "TooFewSamples",
        Error::DimensionTooSmall { .. } => "DimensionTooSmall",
        Error::ZeroPhi => "ZeroPhi",
    }
}

fn finite_or_inf(value: f64) -> Value {
    if value.is_finite() {
        json!(value)
    } else {
        json!("inf")
    }
}

/// 17 significant digits: enough for exact f64 round-trips.
fn csv_f64(value: f64) -> String {
    format!("{value:.16e}")
}

enum Payload {
    Json(Value),
    Csv(String),
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(payload) => {
            let text = match payload {
                Payload::Json(value) => {
                    serde_json::to_string_pretty(&value).expect("serializable report")
                }
                Payload::Csv(text) => text,
            };
            if write_out(&cli, &text) {
                0
            } else {
                2
            }
        }
        Err(failure) => {
            let text =
                serde_json::to_string_pretty(&failure.to_json()).expect("serializable error");
            write_out(&cli, &text);
            failure.exit_code()
        }
    };
    std::process::exit(code);
}

fn write_out(cli: &Cli, text: &str) -> bool {
    let mut body = text.to_string();
    body.push('\n');
    match &cli.output {
        Some(path) => match fs::write(path, body) {
            Ok(()) => true,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                false
            }
        },
        None => {
            print!("{body}");
            true
        }
    }
}

fn load_instance(cli: &Cli) -> Result<Instance, Failure> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Failure::Usage("this command needs --input <instance.json>".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Instance::from_json_str(&text).map_err(Failure::from)
}

fn require_json(cli: &Cli, command: &str) -> Result<(), Failure> {
    if cli.format == Format::Csv {
        return Err(Failure::Usage(format!(
            "`{command}` emits a structured report; csv is available for eig, g-curve, curve and dirichlet"
        )));
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Payload, Failure> {
    match &cli.command {
        Command::Eig => {
            let inst = load_instance(cli)?;
            match cli.format {
                Format::Json => Ok(Payload::Json(json!({
                    "eigenvalues": inst.spectrum().eigenvalues(),
                    "op_norm": inst.op_norm(),
                }))),
                Format::Csv => {
                    let mut out = String::from("index,eigenvalue\n");
                    for (i, ev) in inst.spectrum().eigenvalues().iter().enumerate() {
                        out.push_str(&format!("{i},{}\n", csv_f64(*ev)));
                    }
                    out.pop();
                    Ok(Payload::Csv(out))
                }
            }
        }
        Command::Resolve { lambda } => {
            require_json(cli, "resolve")?;
            let inst = load_instance(cli)?;
            let solution = spectral_resolvent(&inst, *lambda)?;
            let g = g_value(&inst, *lambda)?;
            let mut value = serde_json::to_value(&solution).expect("serializable");
            value["g"] = json!(g);
            Ok(Payload::Json(value))
        }
        Command::GCurve { from, to, steps } => {
            let inst = load_instance(cli)?;
            if *steps < 2 {
                return Err(Failure::Usage("g-curve needs --steps >= 2".into()));
            }
            if !(from < to) {
                return Err(Failure::Usage("g-curve needs --from < --to".into()));
            }
            let ratio = to / from;
            let points: Result<Vec<(f64, f64)>, Error> = (0..*steps)
                .map(|k| {
                    let lambda = from * ratio.powf(k as f64 / (*steps - 1) as f64);
                    g_value(&inst, lambda).map(|g| (lambda, g))
                })
                .collect();
            let points = points?;
            match cli.format {
                Format::Json => Ok(Payload::Json(json!(points
                    .iter()
                    .map(|(lambda, g)| json!({"lambda": lambda, "g": g}))
                    .collect::<Vec<_>>()))),
                Format::Csv => {
                    let mut out = String::from("lambda,g\n");
                    for (lambda, g) in points {
                        out.push_str(&format!("{},{}\n", csv_f64(lambda), csv_f64(g)));
                    }
                    out.pop();
                    Ok(Payload::Csv(out))
                }
            }
        }
        Command::Diagnose => {
            require_json(cli, "diagnose")?;
            let inst = load_instance(cli)?;
            let diagnosis = diagnose_boundary(&inst);
            Ok(Payload::Json(
                serde_json::to_value(&diagnosis).expect("serializable"),
            ))
        }
        Command::Max { r } => {
            require_json(cli, "max")?;
            let inst = load_instance(cli)?;
            let solution = spheremax::maximize_on_sphere(&inst, *r)?;
            Ok(Payload::Json(
                serde_json::to_value(&solution).expect("serializable"),
            ))
        }
        Command::Wellposed { r, samples } => {
            require_json(cli, "wellposed")?;
            let inst = load_instance(cli)?;
            let report = wellposedness_check(&inst, *r, *samples, cli.seed)?;
            Ok(Payload::Json(
                serde_json::to_value(&report).expect("serializable"),
            ))
        }
        Command::Curve { from, to, steps } => {
            let inst = load_instance(cli)?;
            let samples = sample_curve(&inst, *from, *to, *steps)?;
            match cli.format {
                Format::Json => Ok(Payload::Json(
                    serde_json::to_value(&samples).expect("serializable"),
                )),
                Format::Csv => Ok(Payload::Csv(curve_csv(&samples))),
            }
        }
        Command::Audit { from, to, steps } => {
            require_json(cli, "audit")?;
            let inst = load_instance(cli)?;
            let samples = sample_curve(&inst, *from, *to, *steps)?;
            let report = audit_curve(&samples)?;
            Ok(Payload::Json(
                serde_json::to_value(&report).expect("serializable"),
            ))
        }
        Command::Counterexample { which, n } => {
            require_json(cli, "counterexample")?;
            match which {
                Which::R2 => {
                    let report = counterexample_r2(cli.seed);
                    Ok(Payload::Json(
                        serde_json::to_value(&report).expect("serializable"),
                    ))
                }
                Which::L2 => {
                    let variants = vec![
                        counterexample_l2(*n, 1, cli.seed)?,
                        counterexample_l2(*n, 2, cli.seed)?,
                    ];
                    Ok(Payload::Json(json!({
                        "n": n,
                        "variants": serde_json::to_value(&variants).expect("serializable"),
                    })))
                }
            }
        }
        Command::Dirichlet {
            n,
            phi,
            from,
            to,
            steps,
        } => {
            let problem = build_dirichlet(cli, *n, *phi)?;
            let report = eta_curve(&problem, *from, *to, *steps)?;
            match cli.format {
                Format::Json => Ok(Payload::Json(
                    serde_json::to_value(&report).expect("serializable"),
                )),
                Format::Csv => {
                    let mut out = String::from("r,eta,eta_prime,mu,c5_residual\n");
                    for p in &report.points {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            csv_f64(p.r),
                            csv_f64(p.eta),
                            csv_f64(p.eta_prime),
                            csv_f64(p.mu),
                            csv_f64(p.c5_residual)
                        ));
                    }
                    out.pop();
                    Ok(Payload::Csv(out))
                }
            }
        }
    }
}

fn curve_csv(samples: &[spheremax::CurveSample]) -> String {
    let mut out = String::from("r,gamma,gamma_prime,g_inverse,fd_gamma_prime,euler_residual\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_f64(s.r),
            csv_f64(s.gamma),
            csv_f64(s.gamma_prime),
            csv_f64(s.g_inverse),
            csv_f64(s.fd_gamma_prime),
            csv_f64(s.euler_residual)
        ));
    }
    out.pop();
    out
}

fn build_dirichlet(cli: &Cli, n: usize, phi: Phi) -> Result<spheremax::DirichletProblem, Failure> {
    match phi {
        Phi::One => spheremax::build_problem(n, |_| 1.0).map_err(Failure::from),
        Phi::Eig1 => {
            spheremax::build_problem(n, |x| (std::f64::consts::PI * x).sin()).map_err(Failure::from)
        }
        Phi::Eig2 => spheremax::build_problem(n, |x| (2.0 * std::f64::consts::PI * x).sin())
            .map_err(Failure::from),
        Phi::File => {
            let path = cli.input.as_ref().ok_or_else(|| {
                Failure::Usage("`dirichlet --phi file` needs --input with the samples".into())
            })?;
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(Error::Schema(e.to_string())))?;
            let array = value.get("phi").cloned().unwrap_or(value);
            let samples: Vec<f64> = serde_json::from_value(array)
                .map_err(|e| Failure::Input(Error::Schema(format!("phi samples: {e}"))))?;
            spheremax::build_problem_from_samples(n, samples).map_err(Failure::from)
        }
    }
}
