use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use slice_calc::calculus::{
    CalculusError, CalculusMethod, CalculusOptions, CalculusReport, Prepared, Residual,
};
use slice_calc::cliffordop::dirac_demo;
use slice_calc::linalg::CMat;
use slice_calc::operator::{SliceOperator, Space};
use slice_calc::quadratic::{
    estimate_beta, hinf_bound_check, scalar_closed_form, QuadratureOptions,
};
use slice_calc::slicefn::{psi, SliceFunction};
use slice_calc::spectrum::{classify_sector, s_spectrum};

mod funcspec;
mod opfile;
mod report;
mod verify;

use opfile::{Operator, OperatorFile};
use report::{sig6, Document};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{name}: {0}", name = .0.name())]
    Calculus(CalculusError),
    #[error("verification failed")]
    Verify,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Calculus(_) => 4,
            CliError::Verify => 5,
        }
    }
}

impl From<CalculusError> for CliError {
    fn from(e: CalculusError) -> Self {
        CliError::Calculus(e)
    }
}

#[derive(Parser)]
#[command(
    name = "slice-calc",
    version,
    about = "S-spectrum functional calculi for quaternionic and paravector operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// First applicable of rational, sector, hinf, contour.
    Auto,
    Contour,
    Sector,
    Rational,
    Hinf,
    Oracle,
    /// Every method, with the largest pairwise deviation.
    All,
}

impl Method {
    fn calculus(self) -> Option<CalculusMethod> {
        match self {
            Method::Contour => Some(CalculusMethod::Contour),
            Method::Sector => Some(CalculusMethod::SectorContour),
            Method::Rational => Some(CalculusMethod::Rational),
            Method::Hinf => Some(CalculusMethod::Hinf),
            Method::Oracle => Some(CalculusMethod::EigenOracle),
            Method::Auto | Method::All => None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// S-spectrum spheres, the angle ω and optional sectorial constants.
    Spectrum {
        file: PathBuf,
        /// Angles ϑ for the C_ϑ table, comma separated.
        #[arg(long, value_delimiter = ',')]
        sector: Vec<f64>,
    },
    /// Applies a function to an operator.
    Apply {
        file: PathBuf,
        #[arg(long = "func")]
        func: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Relative change accepted between quadrature refinements.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs seeded identity suites.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(verify::suite_names()))]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trials per suite; each suite has its own default.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
    },
    /// Square-function estimates and the resulting bound on ‖f(T)‖.
    Quadratic {
        file: PathBuf,
        /// Exponent k of ψ(s) = (s/(1+s²))^k.
        #[arg(long = "psi", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=16))]
        psi: u32,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also estimates with the adjoint operator.
        #[arg(long)]
        adjoint: bool,
        /// Function for the ‖f(T)‖ ≤ C‖f‖_∞ comparison.
        #[arg(long = "func")]
        func: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
    /// Writes the lattice Dirac operator `mass + Σ e_j ∂_j` as an operator file.
    Dirac {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
    },
}

fn load(path: &Path) -> Result<Operator, CliError> {
    OperatorFile::load(path)?.to_operator()
}

fn operator_header(op: &Operator) -> Value {
    match op.space() {
        Space::Quaternion { m } => json!({"kind": "quaternion-matrix", "m": m}),
        Space::Clifford { n, m } => match op {
            Operator::Paravector(_) => json!({"kind": "paravector", "m": m, "n": n}),
            _ => json!({"kind": "clifford-matrix", "m": m, "n": n}),
        },
    }
}

fn spectrum_cmd(file: &Path, sector: &[f64]) -> Result<String, CliError> {
    let op = load(file)?;
    if let Some(bad) = sector
        .iter()
        .find(|&&t| !(t > 0.0 && t <= std::f64::consts::PI))
    {
        return Err(CliError::Input(format!(
            "sector angle {bad} outside (0, π]"
        )));
    }
    let spec = s_spectrum(&op).map_err(|e| CliError::Numeric(e.to_string()))?;
    let omega = spec.omega();
    let mut line: Vec<String> = spec
        .spheres
        .iter()
        .map(|s| format!("({:?}, {:?}) ×{}", sig6(s.u), sig6(s.v), s.multiplicity))
        .collect();
    line.push(format!("omega={:?}", sig6(omega)));
    let mut doc = Document::new("spectrum")
        .exact("operator", operator_header(&op))
        .summary("spheres", &spec.spheres)
        .summary("omega", omega)
        .exact("summary", line.join("; ").into());
    if !sector.is_empty() {
        let profile = classify_sector(&op, sector).map_err(|e| CliError::Numeric(e.to_string()))?;
        doc = doc.summary("sector", &profile.samples);
    }
    Ok(doc.render())
}

fn check_function(op: &Operator, f: &SliceFunction) -> Result<(), CliError> {
    let n = op.space().algebra_dim();
    if f.dim() > n.max(1) && !f.is_intrinsic() {
        return Err(CliError::Calculus(CalculusError::InvalidParameter(
            format!(
                "{} takes values in R_{} but the operator acts on R_{n}",
                f.label(),
                f.dim()
            ),
        )));
    }
    Ok(())
}

fn result_document(op: &Operator, rep: &CMat) -> Result<Value, CliError> {
    let r = Operator::from_rep(op.space(), rep).map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(
        serde_json::to_value(OperatorFile::from_operator(&r))
            .expect("operator documents serialize"),
    )
}

const ALL_ORDER: [CalculusMethod; 5] = [
    CalculusMethod::Rational,
    CalculusMethod::SectorContour,
    CalculusMethod::Hinf,
    CalculusMethod::Contour,
    CalculusMethod::EigenOracle,
];

fn apply_cmd(file: &Path, func: &str, method: Method, tol: f64) -> Result<String, CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Input(format!("tolerance {tol} must be positive")));
    }
    let op = load(file)?;
    let f = funcspec::parse(func)?;
    check_function(&op, &f)?;
    let p = Prepared::new(&op)?;
    let opts = CalculusOptions {
        tol,
        ..Default::default()
    };
    let doc = Document::new("apply")
        .exact("operator", operator_header(&op))
        .exact("function", f.label().into());
    if method != Method::All {
        let r: CalculusReport<CMat> = match method.calculus() {
            Some(m) => p.apply(&f, m, &opts)?,
            None => p.auto(&f, &opts)?,
        };
        return Ok(doc
            .exact("method", r.method.name().into())
            .summary("diagnostics", &r.diagnostics)
            .exact("result", result_document(&op, &r.result)?)
            .render());
    }
    let runs: Vec<(CalculusMethod, Result<CalculusReport<CMat>, CalculusError>)> = ALL_ORDER
        .iter()
        .map(|&m| (m, p.apply(&f, m, &opts)))
        .collect();
    let ok: Vec<(CalculusMethod, &CalculusReport<CMat>)> = runs
        .iter()
        .filter_map(|(m, r)| r.as_ref().ok().map(|r| (*m, r)))
        .collect();
    let Some(&(_, best)) = ok.first() else {
        let first = runs
            .into_iter()
            .next()
            .and_then(|(_, r)| r.err())
            .expect("at least one method ran");
        return Err(first.into());
    };
    let mut deviation = 0.0f64;
    for (_, a) in &ok {
        for (_, b) in &ok {
            deviation = deviation.max(Residual::between(&a.result, &b.result).absolute);
        }
    }
    let methods: Vec<Value> = runs
        .iter()
        .map(|(m, r)| match r {
            Ok(r) => json!({"method": m.name(), "status": "ok", "diagnostics": report::summary_of(&r.diagnostics)}),
            Err(e) => json!({"method": m.name(), "status": e.name(), "message": e.to_string()}),
        })
        .collect();
    Ok(doc
        .exact("method", "all".into())
        .exact("methods", Value::Array(methods))
        .summary("max_deviation", deviation)
        .exact("result_method", ok[0].0.name().into())
        .exact("result", result_document(&op, &best.result)?)
        .render())
}

fn verify_cmd(suite: &str, seed: u64, trials: Option<u64>) -> Result<(String, bool), CliError> {
    let trials = trials.map(|t| t as usize);
    let indices: Vec<usize> = match suite {
        "all" => (0..verify::SUITES.len()).collect(),
        name => vec![verify::SUITES
            .iter()
            .position(|s| s.name == name)
            .expect("validated by the parser")],
    };
    let reports: Vec<verify::SuiteReport> = indices
        .iter()
        .map(|&i| verify::run_suite(i, seed, trials))
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    let doc = Document::new("verify")
        .exact("seed", seed.into())
        .summary("suites", &reports)
        .exact("passed", passed.into());
    Ok((doc.render(), passed))
}

#[allow(clippy::too_many_arguments)]
fn quadratic_cmd(
    file: &Path,
    k: u32,
    trials: u64,
    seed: u64,
    adjoint: bool,
    func: Option<&str>,
    constant: f64,
) -> Result<String, CliError> {
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(CliError::Input(format!(
            "constant {constant} must be positive"
        )));
    }
    let op = load(file)?;
    let f = func.map(funcspec::parse).transpose()?;
    let opts = QuadratureOptions::default();
    let beta = estimate_beta(&op, &psi(k), trials as usize, seed, adjoint, &opts)?;
    let mut doc = Document::new("quadratic")
        .exact("operator", operator_header(&op))
        .exact("psi", k.into())
        .exact("trials", trials.into())
        .exact("seed", seed.into())
        .exact("adjoint", adjoint.into())
        .summary("beta", beta.beta)
        .summary(
            "integrals",
            beta.samples.iter().map(|s| s * s).collect::<Vec<_>>(),
        );
    if adjoint {
        doc = doc.summary(
            "adjoint_integrals",
            beta.adjoint_samples
                .iter()
                .map(|s| s * s)
                .collect::<Vec<_>>(),
        );
    }
    if op.space().base_size() == 1 {
        let closed = scalar_closed_form(k);
        let dev = beta
            .samples
            .iter()
            .map(|s| (s * s - closed).abs())
            .fold(0.0f64, f64::max);
        doc = doc
            .summary("closed_form", closed)
            .summary("closed_form_deviation", dev);
    }
    if let Some(f) = f {
        check_function(&op, &f)?;
        let b = hinf_bound_check(&op, &f, constant, &opts.calculus)?;
        doc = doc
            .exact("function", f.label().into())
            .summary("hinf_bound", b);
    }
    Ok(doc.render())
}

fn dirac_cmd(n: usize, grid: usize, mass: f64) -> Result<String, CliError> {
    let d = dirac_demo(n, grid, mass).map_err(|e| CliError::Input(e.to_string()))?;
    let mut s = OperatorFile::from_operator(&Operator::Paravector(d)).to_json();
    s.push('\n');
    Ok(s)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SLICE_CALC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Input(format!(
            "SLICE_CALC_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn write_out(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Spectrum { file, sector } => write_out(&spectrum_cmd(file, sector)?, None),
        Command::Apply {
            file,
            func,
            method,
            tol,
            out,
        } => write_out(&apply_cmd(file, func, *method, *tol)?, out.as_deref()),
        Command::Verify {
            suite,
            seed,
            trials,
        } => {
            let (text, passed) = verify_cmd(suite, *seed, *trials)?;
            write_out(&text, None)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verify)
            }
        }
        Command::Quadratic {
            file,
            psi,
            trials,
            seed,
            adjoint,
            func,
            constant,
        } => write_out(
            &quadratic_cmd(
                file,
                *psi,
                *trials,
                *seed,
                *adjoint,
                func.as_deref(),
                *constant,
            )?,
            None,
        ),
        Command::Dirac { n, grid, mass } => write_out(&dirac_cmd(*n, *grid, *mass)?, None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slice-calc: {e}");
            ExitCode::from(e.code())
        }
    }
}
