//! Command-line front end for `qmat-core`.
//!
//! Elements and derivation specs are read from JSON files in the formats
//! defined by the core crate; results go to standard output as JSON or as a
//! short markdown rendering.

pub mod suite;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmat_core::check::{all_passed, Check};
use qmat_core::derivations::{
    check_derivation, check_torus_derivation, decompose_torus_derivation, express_hh1, lift_to_torus,
    TorusDecomposition,
};
use qmat_core::kernel::{DEFAULT_MAX_TERMS, MAX_SUITE_N};
use qmat_core::qmatrix::commutes_with_all_generators;
use qmat_core::{
    build_context, qdet, qminor, ExponentBox, GeneratorIndex, MatrixAlgebraElement, MatrixDerivation, MinorSpec,
    QmatError, TorusDerivation, TorusElement, Tower,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "qmat", version, about = "Exact computations in O_q(M_n), its quantum torus and their derivations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Matrix size.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Algebra of the input elements.
    #[arg(long, global = true, value_enum, default_value_t = Alg::Mq)]
    pub alg: Alg,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub out: OutputFormat,
    /// Cap on intermediate term counts.
    #[arg(long, global = true, env = "QMAT_MAX_TERMS", default_value_t = DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Exponent box for rebasing: `K` for [-K, K] or `LO:HI`.
    #[arg(long = "box", global = true, value_parser = parse_box)]
    pub bounds: Option<(i64, i64)>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alg {
    #[value(name = "Mq", alias = "mq")]
    Mq,
    #[value(name = "torus")]
    Torus,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Product of two elements.
    Mul { lhs: PathBuf, rhs: PathBuf },
    /// The quantum determinant.
    Det,
    /// A quantum minor.
    Minor {
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<usize>,
    },
    /// Image of an `O_q(M_n)` element in the quantum torus.
    Embed { file: PathBuf },
    /// Whether an element is central.
    Central { file: PathBuf },
    /// The deleting-derivations table.
    ExportTable,
    /// Derivation tools.
    Derivation {
        #[command(subcommand)]
        action: DerivationAction,
    },
    /// Run every verification check at the given n.
    VerifySuite {
        /// Record wall time per check.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum DerivationAction {
    /// Check the Leibniz rule on every defining relation.
    Check { file: PathBuf },
    /// Split into inner and central-diagonal torus parts.
    Decompose { file: PathBuf },
    /// Coordinates `d = ad_x + Σ μ_j D_j`.
    Hh1 { file: PathBuf },
}

fn parse_box(s: &str) -> Result<(i64, i64), String> {
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad bound {t:?}: {e}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let k = parse(s)?;
            (-k, k)
        }
    };
    if lo > hi {
        return Err(format!("empty box {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Qmat(#[from] QmatError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::ResourceLimit(_) => 1,
            CliError::Qmat(e) => match e {
                QmatError::Parse(_)
                | QmatError::InvalidSpec(_)
                | QmatError::InvalidDimension(_)
                | QmatError::IndexOutOfRange(_) => 2,
                QmatError::DimensionMismatch { .. } => 3,
                QmatError::NotADerivation(_) | QmatError::Inconsistent(_) => 4,
                _ => 1,
            },
        }
    }
}

/// What a command prints, plus its exit status.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
    /// Printed to standard error when present.
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0, diagnostic: None }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })
}

fn require_n(global: &GlobalArgs) -> CliResult<usize> {
    global.n.ok_or_else(|| CliError::Usage("this command needs --n".into()))
}

fn check_n(global: &GlobalArgs, found: usize) -> CliResult<usize> {
    match global.n {
        Some(expected) if expected != found => Err(QmatError::DimensionMismatch { expected, found }.into()),
        _ => Ok(found),
    }
}

fn tower(n: usize, global: &GlobalArgs) -> CliResult<Tower> {
    Ok(Tower::new(build_context(n)?.with_max_terms(global.max_terms))?)
}

fn exponent_box(n: usize, global: &GlobalArgs) -> CliResult<Option<ExponentBox>> {
    Ok(match global.bounds {
        Some((lo, hi)) => Some(ExponentBox::uniform(n, lo, hi)?),
        None => None,
    })
}

fn emit<T: Serialize>(global: &GlobalArgs, value: &T, markdown: impl FnOnce() -> String) -> CliResult<String> {
    Ok(match global.out {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Markdown => markdown(),
    })
}

fn emit_element<T: Serialize + std::fmt::Display>(global: &GlobalArgs, x: &T) -> CliResult<String> {
    emit(global, x, || format!("{x}\n"))
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Mul { lhs, rhs } => cmd_mul(g, lhs, rhs).map(Outcome::ok),
        Command::Det => emit_element(g, &qdet(require_n(g)?)).map(Outcome::ok),
        Command::Minor { rows, cols } => {
            let n = require_n(g)?;
            let spec = MinorSpec::new(n, rows.clone(), cols.clone())?;
            emit_element(g, &qminor(n, &spec)).map(Outcome::ok)
        }
        Command::Embed { file } => {
            let x: MatrixAlgebraElement = read_json(file)?;
            let n = check_n(g, x.n())?;
            emit_element(g, &tower(n, g)?.embed(&x)?).map(Outcome::ok)
        }
        Command::Central { file } => cmd_central(g, file).map(Outcome::ok),
        Command::ExportTable => {
            let tw = tower(require_n(g)?, g)?;
            emit(g, &tw.to_json(), || table_markdown(&tw)).map(Outcome::ok)
        }
        Command::Derivation { action } => cmd_derivation(g, action),
        Command::VerifySuite { timings } => {
            let n = require_n(g)?;
            if n > MAX_SUITE_N {
                return Err(CliError::ResourceLimit(format!("verify-suite is capped at n <= {MAX_SUITE_N}, got n={n}")));
            }
            let report = suite::run_suite(n, g.max_terms, *timings)?;
            let code = if report.passed { 0 } else { 1 };
            let stdout = emit(g, &report, || suite::to_markdown(&report))?;
            let diagnostic = (!report.passed).then(|| format!("{} of {} checks failed", report.failures, report.total));
            Ok(Outcome { stdout, code, diagnostic })
        }
    }
}

fn cmd_mul(g: &GlobalArgs, lhs: &Path, rhs: &Path) -> CliResult<String> {
    match g.alg {
        Alg::Mq => {
            let x: MatrixAlgebraElement = read_json(lhs)?;
            let y: MatrixAlgebraElement = read_json(rhs)?;
            check_n(g, x.n())?;
            if x.n() != y.n() {
                return Err(QmatError::DimensionMismatch { expected: x.n(), found: y.n() }.into());
            }
            emit_element(g, &x.mul(&y, g.max_terms)?)
        }
        Alg::Torus => {
            let x: TorusElement = read_json(lhs)?;
            let y: TorusElement = read_json(rhs)?;
            check_n(g, x.n())?;
            if x.n() != y.n() {
                return Err(QmatError::DimensionMismatch { expected: x.n(), found: y.n() }.into());
            }
            emit_element(g, &(&x * &y))
        }
    }
}

fn cmd_central(g: &GlobalArgs, file: &Path) -> CliResult<String> {
    let central = match g.alg {
        Alg::Mq => {
            let x: MatrixAlgebraElement = read_json(file)?;
            check_n(g, x.n())?;
            commutes_with_all_generators(&x, g.max_terms)?
        }
        Alg::Torus => {
            let x: TorusElement = read_json(file)?;
            check_n(g, x.n())?;
            x.is_central()
        }
    };
    emit(g, &json!({ "central": central }), || format!("{central}\n"))
}

fn table_markdown(tw: &Tower) -> String {
    let n = tw.n();
    let mut out = String::new();
    for &step in tw.context().steps() {
        let _ = writeln!(out, "## step {step}\n");
        for gen in GeneratorIndex::all(n) {
            let entry = tw.entry(step, gen).expect("valid step");
            let _ = writeln!(out, "- {gen}: {entry}");
        }
        out.push('\n');
    }
    out
}

/// The `"alg"` tag of a derivation spec file.
fn spec_alg(path: &Path) -> CliResult<Alg> {
    let v: Value = read_json(path)?;
    match v.get("alg").and_then(Value::as_str) {
        Some("Mq") => Ok(Alg::Mq),
        Some("torus") => Ok(Alg::Torus),
        other => Err(CliError::Parse { path: path.to_owned(), message: format!("unknown derivation alg {other:?}") }),
    }
}

fn check_report(n: usize, checks: &[Check]) -> Value {
    json!({ "n": n, "derivation": all_passed(checks), "checks": checks })
}

fn checks_markdown(checks: &[Check]) -> String {
    let mut out = String::from("| relation | status | witness |\n|---|---|---|\n");
    for c in checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "| `{}` | {status} | {} |", c.name, c.witness.as_deref().unwrap_or(""));
    }
    out
}

fn decomposition_markdown(d: &TorusDecomposition) -> String {
    let n = d.x.n();
    let mut out = format!("x = {}\n", d.x);
    for gen in GeneratorIndex::all(n) {
        let _ = writeln!(out, "z{gen} = {}", d.z_at(gen));
    }
    out
}

fn cmd_derivation(g: &GlobalArgs, action: &DerivationAction) -> CliResult<Outcome> {
    match action {
        DerivationAction::Check { file } => {
            let (n, checks) = match spec_alg(file)? {
                Alg::Mq => {
                    let d: MatrixDerivation = read_json(file)?;
                    (check_n(g, d.n())?, check_derivation(&d, g.max_terms))
                }
                Alg::Torus => {
                    let d: TorusDerivation = read_json(file)?;
                    (check_n(g, d.n())?, check_torus_derivation(&d))
                }
            };
            let stdout = emit(g, &check_report(n, &checks), || checks_markdown(&checks))?;
            Ok(match checks.iter().find(|c| !c.passed) {
                None => Outcome::ok(stdout),
                Some(bad) => {
                    let err = CliError::from(QmatError::NotADerivation(bad.name.clone()));
                    Outcome { stdout, code: err.exit_code(), diagnostic: Some(err.to_string()) }
                }
            })
        }
        DerivationAction::Decompose { file } => {
            let lifted = match spec_alg(file)? {
                Alg::Mq => {
                    let d: MatrixDerivation = read_json(file)?;
                    lift_to_torus(&d, &tower(check_n(g, d.n())?, g)?)?
                }
                Alg::Torus => {
                    let d: TorusDerivation = read_json(file)?;
                    check_n(g, d.n())?;
                    d
                }
            };
            let parts = decompose_torus_derivation(&lifted)?;
            emit(g, &parts, || decomposition_markdown(&parts)).map(Outcome::ok)
        }
        DerivationAction::Hh1 { file } => {
            if spec_alg(file)? != Alg::Mq {
                return Err(CliError::Usage("hh1 needs a derivation of O_q(M_n) (alg \"Mq\")".into()));
            }
            let d: MatrixDerivation = read_json(file)?;
            let n = check_n(g, d.n())?;
            let bx = exponent_box(n, g)?;
            let coords = express_hh1(&d, &tower(n, g)?, bx.as_ref())?;
            emit(g, &coords, || {
                let mut out = format!("inner = {}\n", coords.inner);
                for (j, mu) in coords.mu.iter().enumerate() {
                    let _ = writeln!(out, "mu_{} = {mu}", j + 1);
                }
                out
            })
            .map(Outcome::ok)
        }
    }
}
