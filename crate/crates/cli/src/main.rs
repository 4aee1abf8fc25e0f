use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orthoiso::canonical::{assemble_canonical, CanonicalSpec, SegmentSpec};
use orthoiso::isotropy::{self, verify, Frame, DEFAULT_TOL};
use orthoiso::json::{self, JsonScalar};
use orthoiso::matrix::DEFAULT_FLOAT_TOL;
use orthoiso::oracle::{commutant_so_dim_with_tol, sweep};
use orthoiso::random;
use orthoiso::solver::congruence_solve;
use orthoiso::toeplitz::{congruence_form, f_block, reshuffle, unshuffle};
use orthoiso::{Backend, Error, ExactScalar, FloatScalar, Matrix};
use serde_json::{json, Value};

/// Isotropy groups of orthogonal similarity on complex skew-symmetric and orthogonal matrices.
///
/// Every `--spec`, `--matrix`, `--q`, `--problem` and `--free` value is a path to a
/// JSON file, or the JSON document itself when it starts with `{` or `[`.
#[derive(Parser, Debug)]
#[command(name = "orthoiso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = BackendArg::Exact, global = true)]
    backend: BackendArg,

    /// Float tolerance (verification default 1e-9, rank decisions default 1e-8).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble the canonical matrix of a spec.
    Canonical {
        #[arg(long)]
        spec: String,
    },
    /// Closed-form isotropy dimension of a spec.
    Dim {
        #[arg(long)]
        spec: String,
    },
    /// Random isotropy elements with certificates.
    Sample {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Check that Q is orthogonal and fixes M.
    Verify {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        q: String,
    },
    /// Solve a congruence problem from its free parameters.
    Solve {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        free: String,
    },
    /// Conjugate between the segment-structured layout and block Toeplitz form.
    Reshuffle {
        /// Segment data `{"alpha":[..],"mu":[..]}` (a full spec is accepted too).
        #[arg(long)]
        spec: String,
        #[arg(long)]
        matrix: String,
        /// Map a block Toeplitz matrix back to the structured layout.
        #[arg(long)]
        inverse: bool,
    },
    /// Dimension of the skew-symmetric commutant of a matrix.
    OracleDim {
        #[arg(long)]
        matrix: String,
    },
    /// Closed-form dimensions against the oracle for all specs up to a size.
    OracleSweep {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Also write the table to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

enum Failure {
    Input(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.kind().into(), e.to_string())
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn load(arg: &str) -> Result<Value, Failure> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input("Io".into(), format!("{arg}: {e}")))?
    };
    Ok(json::parse(&text)?)
}

fn segments_of(v: &Value) -> Result<SegmentSpec, Failure> {
    Ok(json::segment_spec_from_json(
        &json!({ "alpha": v["alpha"], "mu": v["mu"] }),
    )?)
}

fn tol_or(cli: &Cli, default: f64) -> f64 {
    cli.tol.unwrap_or(default)
}

fn run<T: JsonScalar>(cli: &Cli) -> Outcome {
    let verify_tol = tol_or(cli, DEFAULT_TOL);
    match &cli.command {
        Command::Canonical { spec } => {
            let spec: CanonicalSpec<T> = json::spec_from_json(&load(spec)?)?;
            let m = assemble_canonical(&spec)?;
            Ok((
                json!({ "spec": json::spec_to_json(&spec), "matrix": json::matrix_to_json(&m) }),
                true,
            ))
        }
        Command::Dim { spec } => {
            let spec: CanonicalSpec<T> = json::spec_from_json(&load(spec)?)?;
            Ok((json!({ "dim": isotropy::dim(&spec) }), true))
        }
        Command::Sample { spec, count } => {
            let spec: CanonicalSpec<T> = json::spec_from_json(&load(spec)?)?;
            let frame = Frame::new(&spec)?;
            let form = frame.spec_form()?;
            let mut rng = random::rng(cli.seed);
            let mut all = true;
            let mut elements = Vec::new();
            for _ in 0..*count {
                let el = frame.sample(&mut rng)?;
                let cert = verify(&form, &el.q, verify_tol)?;
                all &= cert.verified;
                elements.push(json!({
                    "q": json::matrix_to_json(&el.q),
                    "certificate": json::certificate_to_json(&cert),
                }));
            }
            let doc = json!({
                "spec": json::spec_to_json(&spec),
                "seed": cli.seed,
                "form": json::matrix_to_json(&form),
                "elements": elements,
            });
            Ok((doc, all))
        }
        Command::Verify { matrix, q } => {
            let m: Matrix<T> = json::matrix_from_json(&load(matrix)?)?;
            let q: Matrix<T> = json::matrix_from_json(&load(q)?)?;
            let cert = verify(&m, &q, verify_tol)?;
            let doc = json!({
                "stabilizes": cert.verified,
                "residual": json::residual_string(cert.orthogonality.max(cert.stabilizer)),
                "certificate": json::certificate_to_json(&cert),
            });
            Ok((doc, cert.verified))
        }
        Command::Solve { problem, free } => {
            let problem = json::problem_from_json::<T>(&load(problem)?)?;
            let free = json::free_from_json::<T>(&load(free)?)?;
            let x = congruence_solve(&problem, &free)?;
            let f = f_block::<T>(problem.spec());
            let r = &congruence_form(&f, &problem.b().assemble(), &x.assemble()) - &problem.c().assemble();
            let ok = match T::BACKEND {
                Backend::Exact => r.is_zero(),
                Backend::Float => r.max_abs() <= verify_tol,
            };
            let doc = json!({
                "solution": json::toeplitz_to_json(&x),
                "matrix": json::matrix_to_json(&x.assemble()),
                "residual": json::residual_string(r.max_abs()),
                "verified": ok,
            });
            Ok((doc, ok))
        }
        Command::Reshuffle { spec, matrix, inverse } => {
            let segments = segments_of(&load(spec)?)?;
            let m: Matrix<T> = json::matrix_from_json(&load(matrix)?)?;
            let out = if *inverse {
                unshuffle(&segments, &m)?
            } else {
                reshuffle(&segments, &m)?
            };
            Ok((json!({ "matrix": json::matrix_to_json(&out) }), true))
        }
        Command::OracleDim { matrix } => {
            let m: Matrix<T> = json::matrix_from_json(&load(matrix)?)?;
            let d = commutant_so_dim_with_tol(&m, tol_or(cli, DEFAULT_FLOAT_TOL))?;
            Ok((json!({ "dim": d }), true))
        }
        Command::OracleSweep { max_size, report } => {
            let rows = sweep::<T>(*max_size)?;
            let all = rows.iter().all(|r| r.matches());
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "spec": json::spec_to_json(&r.spec),
                        "formula": r.formula,
                        "oracle": r.oracle,
                        "match": r.matches(),
                    })
                })
                .collect();
            let doc = json!({ "max_size": max_size, "all_match": all, "rows": table });
            if let Some(path) = report {
                write(path, &doc)?;
            }
            Ok((doc, all))
        }
    }
}

fn write(path: &PathBuf, doc: &Value) -> Result<(), Failure> {
    std::fs::write(path, format!("{doc}\n"))
        .map_err(|e| Failure::Input("Io".into(), format!("{}: {e}", path.display())))
}

fn emit(doc: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{doc}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.backend {
        BackendArg::Exact => run::<ExactScalar>(&cli),
        BackendArg::Float => run::<FloatScalar>(&cli),
    };
    let (doc, code) = match outcome {
        Ok((doc, true)) => (doc, 0),
        Ok((doc, false)) => (doc, 1),
        Err(Failure::Input(kind, detail)) => (json!({ "error": { "kind": kind, "detail": detail } }), 2),
    };
    match &cli.out {
        Some(path) if code != 2 => {
            if let Err(Failure::Input(kind, detail)) = write(path, &doc) {
                emit(&json!({ "error": { "kind": kind, "detail": detail } }));
                return ExitCode::from(2);
            }
        }
        _ => emit(&doc),
    }
    ExitCode::from(code)
}
