//! `adae`: pencil analysis, decoupled solves and model demos.

mod analyze;
mod input;
mod output;
mod solve;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "adae", version, about = "Analyze and solve linear DAEs d/dt Ex = Ax + f")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index estimates, subspace chains, certificates and implication checks.
    Analyze(CommonArgs),
    /// Decoupled solve on a uniform grid.
    Solve(SolveArgs),
    /// Generate a model, analyze it and run its canonical solve.
    Demo(DemoArgs),
    /// Write a model pencil as JSON.
    Generate(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Pencil JSON, or a problem JSON with `pencil`, `forcing` and `x0` fields.
    #[arg(long, conflicts_with = "model")]
    pub input: Option<PathBuf>,
    /// Built-in model: heat-wave, rlc, rlc-degenerate, weierstrass, n2, semi-explicit.
    #[arg(long)]
    pub model: Option<String>,
    /// Grid parameter of the discretized models.
    #[arg(long)]
    pub m: Option<usize>,
    /// Kronecker index of the generated Weierstraß pencil.
    #[arg(long, default_value_t = 2)]
    pub index: usize,
    /// Lossless transmission line (R = G = 0).
    #[arg(long)]
    pub lossless: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub lambda_points: Option<usize>,
    /// Shift for the dissipativity certificates; searched when absent.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1.0)]
    pub tf: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Forcing JSON (polynomial or sampled); overrides the problem file.
    #[arg(long)]
    pub forcing: Option<PathBuf>,
    /// Shift μ of the decoupling; chosen automatically when absent.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Also run the implicit Euler reference and record the deviation.
    #[arg(long)]
    pub cross_check: bool,
}

#[derive(Args, Debug, Clone)]
pub struct DemoArgs {
    /// heat-wave, rlc or weierstrass.
    pub name: String,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1.0)]
    pub tf: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

/// Failure classes of the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// I/O or malformed input.
    Input(anyhow::Error),
    /// Artifacts written, but the analysis broke an implication.
    Violation(Vec<String>),
    Smoothness(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 1,
            Self::Violation(_) => 2,
            Self::Smoothness(_) => 3,
        }
    }
}

impl From<adae_core::Error> for Failure {
    fn from(e: adae_core::Error) -> Self {
        match e {
            adae_core::Error::InsufficientSmoothness { needed, available } => Self::Smoothness(format!(
                "forcing must be differentiable to order {needed}, it provides {available}"
            )),
            other => Self::Input(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<adae_core::Error>() {
            Ok(core) => core.into(),
            Err(e) => Self::Input(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.into())
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(args) => analyze::cmd_analyze(&args),
        Command::Solve(args) => solve::cmd_solve(&args),
        Command::Demo(args) => solve::cmd_demo(&args),
        Command::Generate(args) => input::cmd_generate(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors belong to the input class; clap would exit with 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Violation(v) => {
                    for line in v {
                        eprintln!("implication violated: {line}");
                    }
                }
                Failure::Smoothness(m) => eprintln!("error: insufficient smoothness: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
