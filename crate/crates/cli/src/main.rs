//! Command-line front end for the mlfrac library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "mlfrac",
    version,
    about = "Mittag-Leffler fractional calculus and nonlocal parabolic solver"
)]
struct Cli {
    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Warn)]
    log_level: LogLevel,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 20240607)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LogLevel {
    Off,
    Error,
    Warn,
    Info,
    Debug,
    Trace,
}

impl LogLevel {
    fn filter(self) -> log::LevelFilter {
        match self {
            LogLevel::Off => log::LevelFilter::Off,
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
            LogLevel::Trace => log::LevelFilter::Trace,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_{α,β}(z) at one point or on a grid
    MlEval(MlEvalArgs),
    /// Sample the time kernel envelope and check its symmetry
    KernelVerify(KernelVerifyArgs),
    /// Apply a time operator to a sampled series
    AbApply(AbApplyArgs),
    /// Solve the scalar fractional relaxation equation
    FodeSolve(FodeSolveArgs),
    /// Apply a spatial operator to a sampled field
    SpaceApply(SpaceApplyArgs),
    /// Run the space-time solver from a JSON configuration
    PdeSolve(PdeSolveArgs),
    /// Regularity diagnostics on a solved field
    Diagnose(DiagnoseArgs),
    /// Run the acceptance suite and print a pass/fail table
    Acceptance(AcceptanceArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct MlEvalArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    pub z: Option<f64>,
    /// start:stop:n
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// CSV output for grid evaluations (stdout when absent)
    #[arg(long, requires = "grid")]
    pub csv: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKindArg {
    Ml,
    Caputo,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct KernelVerifyArgs {
    #[arg(long, value_enum)]
    pub kind: KernelKindArg,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// report file (stdout when absent)
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AbForm {
    Deriv,
    Caputo,
    History,
    Integral,
    Discrete,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct AbApplyArgs {
    #[arg(long, value_enum)]
    pub form: AbForm,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub kappa: usize,
    /// CSV with columns t,u on the grid nodes
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct FodeSolveArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub c0: f64,
    #[arg(long)]
    pub c1: f64,
    /// const:v, indicator:a,b or csv:path (columns t,h)
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    #[arg(long)]
    pub u0: f64,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub end: f64,
    #[arg(long)]
    pub kappa: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub residual_report: Option<PathBuf>,
    /// residual threshold for accepting a candidate formula
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceOp {
    Lap,
    Mplus,
    Mminus,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Sigma,
    TwoSigma,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SpaceApplyArgs {
    #[arg(long, value_enum)]
    pub op: SpaceOp,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long = "Lambda", default_value_t = 1.0)]
    pub lambda_upper: f64,
    /// CSV with columns x,u on a uniform grid symmetric about 0
    #[arg(long)]
    pub field: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// zero, none or constant:v
    #[arg(long, default_value = "zero")]
    pub far_field: String,
    /// Lévy measure exponent for the Pucci operators
    #[arg(long, value_enum, default_value_t = MeasureArg::Sigma)]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 1e-9)]
    pub quad_tol: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct PdeSolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub diag: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DiagnoseMode {
    Osc,
    Holder,
    PointEstimate,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct DiagnoseArgs {
    /// field file from pde-solve (not used by point-estimate)
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: DiagnoseMode,
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct AcceptanceArgs {
    /// comma-separated criterion numbers (default: all)
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
    /// machine-readable verdicts
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<i32> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::validation("threads", e.to_string()))?;
    }
    match cli.command {
        Command::MlEval(a) => commands::ml_eval(&a),
        Command::KernelVerify(a) => commands::kernel_verify(&a, cli.seed),
        Command::AbApply(a) => commands::ab_apply(&a),
        Command::FodeSolve(a) => commands::fode_solve(&a),
        Command::SpaceApply(a) => commands::space_apply(&a),
        Command::PdeSolve(a) => commands::pde_solve(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Acceptance(a) => commands::acceptance(&a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::validation("arguments", e.render().to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    env_logger::Builder::new()
        .filter_level(cli.log_level.filter())
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
