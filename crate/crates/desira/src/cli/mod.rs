//! Command-line front end.
//!
//! Grammar: `desira <command> [subcommand] [--flag value]...`. Commands
//! reproduce the worked examples, run configured optimizations, score
//! designs, and emit CSV/SVG artifacts. Every run is deterministic given
//! its flags and config (seeds are explicit). Exit codes: 0 success,
//! 1 runtime/numeric failure, 2 usage/config error.

mod demo;
mod mm;
mod plot;
mod sbo;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "DESIRA_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "desira",
    version,
    about = "Multi-objective optimization through desirability functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce the worked optimization examples
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Run a configured surrogate-based optimization
    Sbo(SboArgs),
    /// Export a desirability curve as CSV and SVG
    PlotDesirability(PlotArgs),
    /// Space-filling criteria over sampling plans
    #[command(subcommand)]
    Mm(MmCommand),
}

#[derive(Debug, Subcommand)]
enum DemoCommand {
    /// Maximize the chemical-reaction desirability with multistart
    /// Nelder-Mead and write best-point contour grids
    Chemical(ChemicalArgs),
}

#[derive(Debug, Args)]
struct ChemicalArgs {
    /// Design-region shape for the penalty
    #[arg(long, value_enum, default_value_t = SpaceArg::Square)]
    space: SpaceArg,
    /// Axial distance bounding the region
    #[arg(long, default_value_t = 1.682)]
    alpha: f64,
    /// Output directory (default: $DESIRA_OUT_DIR or .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceArg {
    Square,
    Circular,
}

#[derive(Debug, Args)]
struct SboArgs {
    /// Configuration document
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: config `out_dir`, then $DESIRA_OUT_DIR, then .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Spec name: built-in (conversion, activity, logistic, box,
    /// categorical) or a `[desirability.<name>]` section of --config
    #[arg(long)]
    spec: String,
    /// Configuration document declaring desirability sections
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $DESIRA_OUT_DIR or .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum MmCommand {
    /// Print the space-filling criteria and distance profile of a design
    Eval(MmEvalArgs),
    /// Score the coverage improvement of adding one point to a design
    Improve(MmImproveArgs),
    /// Run the explore/exploit driver from a design and write its traces
    Explore(MmExploreArgs),
}

#[derive(Debug, Args)]
struct MmEvalArgs {
    /// Design CSV, one point per row
    #[arg(long)]
    design: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct MmImproveArgs {
    #[arg(long)]
    design: PathBuf,
    /// Candidate point, comma-separated coordinates
    #[arg(long)]
    point: String,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct MmExploreArgs {
    /// Baseline design CSV, one point per row
    #[arg(long)]
    design: PathBuf,
    /// Run seed (also seeds the improvement-ceiling calibration)
    #[arg(long)]
    seed: u64,
    /// Total surrogate-loop evaluations
    #[arg(long, default_value_t = 40)]
    budget: usize,
    /// Scalarization calls before switching to pure exploitation
    #[arg(long, default_value_t = 10)]
    switch_after: usize,
    /// Surrogate warmup sample size
    #[arg(long, default_value_t = 10)]
    n_initial: usize,
    /// Search box as `low:high` per dimension (default -2:2 everywhere)
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Histogram bins for the infill diagnostics
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Output directory (default: $DESIRA_OUT_DIR or .)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub(crate) struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub(crate) fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

pub(crate) type CliResult = std::result::Result<(), CliError>;

fn resolve_out_dir(flag: &Option<PathBuf>, config_value: Option<&str>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.clone();
    }
    if let Some(dir) = config_value {
        return PathBuf::from(dir);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from("."),
    }
}

/// Run the CLI against explicit arguments, writing all human output to
/// `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Demo(DemoCommand::Chemical(args)) => demo::chemical(&args, out),
        Command::Sbo(args) => sbo::run(&args, out),
        Command::PlotDesirability(args) => plot::run(&args, out),
        Command::Mm(MmCommand::Eval(args)) => mm::eval(&args, out),
        Command::Mm(MmCommand::Improve(args)) => mm::improve(&args, out),
        Command::Mm(MmCommand::Explore(args)) => mm::explore(&args, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(out, "error: {}", e.message);
            e.code
        }
    }
}

/// Entry point for the binary: real process arguments, stdout.
pub fn main() -> i32 {
    let mut stdout = std::io::stdout();
    run(std::env::args_os(), &mut stdout)
}
