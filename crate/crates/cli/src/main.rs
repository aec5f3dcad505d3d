//! `srd`: sequential rate-distortion curves, finite-horizon solves, sensor
//! realizations and Monte Carlo checks from the command line.
//!
//! Data goes to `--out` (or stdout); summaries go to stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad arguments, 3 invalid model or
//! realization file, 4 solver failure, 5 simulation z-score above 4.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "srd", version, about = "Sequential rate-distortion of Gauss-Markov sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Report summary rates in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate-distortion curve over a distortion grid.
    Curve(CurveArgs),
    /// Evaluate the two-mode counterexample `A = diag(a, 0)`.
    Counterexample(CounterexampleArgs),
    /// Solve the finite-horizon program.
    Finite(FiniteArgs),
    /// Build the optimal sensor and write it as JSON.
    Realize(RealizeArgs),
    /// Monte Carlo check of a realization.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    dmin: f64,
    #[arg(long, default_value_t = 2.0)]
    dmax: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Space the grid logarithmically.
    #[arg(long)]
    log_grid: bool,
    /// Comma-separated methods: sdp, rwf, scalar.
    #[arg(long, value_delimiter = ',', default_value = "sdp,rwf")]
    methods: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct CounterexampleArgs {
    #[arg(long)]
    a: f64,
    #[arg(long = "distortion", short = 'd')]
    distortion: f64,
    /// Distortion split `D1,D2` with `D1 + D2 = D`.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    split: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct FiniteArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "distortion", short = 'd')]
    distortion: f64,
    /// Last time index `n`; the horizon has `n + 1` steps.
    #[arg(long, short = 'n')]
    horizon: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
#[command(group(ArgGroup::new("kind").required(true).args(["horizon", "stationary"])))]
pub struct RealizeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "distortion", short = 'd')]
    distortion: f64,
    #[arg(long, short = 'n')]
    horizon: Option<usize>,
    #[arg(long)]
    stationary: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    realization: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    trajectories: usize,
    #[arg(long, default_value_t = 50)]
    horizon: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Curve(a) => commands::curve(&a),
        Command::Counterexample(a) => commands::counterexample(&a),
        Command::Finite(a) => commands::finite(&a),
        Command::Realize(a) => commands::realize(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
