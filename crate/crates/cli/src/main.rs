//! `srmaint`: estimate seniority-dependent transition matrices from career
//! records and compute maintainable regions under control by recruitment.
//!
//! Exit codes: 0 success, 1 other failures, 2 malformed input, 3 seniority
//! overflow, 4 block chain without a unique fixed point, 5 unidentified rows
//! refused, 6 path not maintainable, 7 unreadable region file.

/// `println!` that ignores a closed standard output (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use srmaint_core::Error;

#[derive(Debug, Parser)]
#[command(name = "srmaint", version, about = "Maintainable regions for Markov and semi-Markov manpower systems")]
struct Cli {
    /// Suppress tables and notes on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print machine-readable JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomised commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate P(0..K) and seniority weights from a records CSV.
    Estimate(EstimateArgs),
    /// Expand a model into the seniority-based matrix P_SM.
    Build(BuildArgs),
    /// Compute a maintainable region.
    Region(RegionArgs),
    /// Simulate a State Re-union path.
    Simulate(SimulateArgs),
    /// Build the Markov chain induced by seniority weights.
    Induce(InduceArgs),
    /// Compare the SR region with an induced or stored region.
    Compare(CompareArgs),
    /// Draw three-state regions as a ternary SVG.
    Plot(PlotArgs),
    /// Generate synthetic career records from a model.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// CSV with columns person_id,time,state[,seniority0].
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    max_seniority: usize,
    #[arg(long)]
    out: PathBuf,
    /// Organisational state labels in order; inferred from the records when omitted.
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    #[arg(long, default_value = "W")]
    wastage_label: String,
    /// Fail on stays beyond the maximal seniority instead of censoring them.
    #[arg(long)]
    strict: bool,
    /// Last observed time; defaults to the latest record.
    #[arg(long)]
    horizon: Option<u64>,
    /// Do not warn about rows without exposure.
    #[arg(long)]
    allow_unidentified: bool,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Markov,
    Sr,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Mode::Sr)]
    mode: Mode,
    /// Seniority weights for an induced chain (markov mode).
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_unidentified: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Seniority-based start structure: JSON file or comma-separated list.
    #[arg(long, conflicts_with = "target", required_unless_present = "target")]
    start: Option<String>,
    /// Organisational structure; random seniority mixes (see --seed) are drawn
    /// until one gives a maintainable path.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Trace CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InduceArgs {
    #[arg(long)]
    model: PathBuf,
    /// Seniority weights; the model's own weights when omitted.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Compare against a stored region instead of an induced chain.
    #[arg(long, conflicts_with = "weights")]
    against: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    allow_unidentified: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    region: PathBuf,
    #[arg(long)]
    overlay: Vec<PathBuf>,
    /// Legend labels, one per region; file stems by default.
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    /// Corner names for s1, s2, s3.
    #[arg(long, value_delimiter = ',', default_values_t = ["s1".to_string(), "s2".to_string(), "s3".to_string()])]
    corners: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1000)]
    persons: usize,
    #[arg(long, default_value_t = 20)]
    horizon: u64,
    /// Entry distribution over organisational states: JSON file or list.
    #[arg(long)]
    entry: String,
    #[arg(long)]
    out: PathBuf,
}

/// Output switches shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct Output {
    pub quiet: bool,
    pub json: bool,
    pub seed: u64,
}

/// A failure and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    RegionFile(PathBuf, Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::RegionFile(..) => 7,
            Failure::Usage(_) => 1,
            Failure::Core(e) => match e {
                Error::MalformedRecord { .. }
                | Error::NoRecords
                | Error::Csv(_)
                | Error::Json(_)
                | Error::Format(_)
                | Error::DimensionMismatch { .. }
                | Error::ZeroVector { .. }
                | Error::InvalidStateSpace(_)
                | Error::InvalidMatrix(_)
                | Error::InvalidKernel(_)
                | Error::InvalidWeights(_)
                | Error::InvalidGrowth(_) => 2,
                Error::SeniorityOverflow { .. } | Error::MaxSeniorityOverflow { .. } => 3,
                Error::FixedPointNotUnique { .. } => 4,
                Error::Unidentified { .. } => 5,
                Error::NonMaintainable { .. } => 6,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::RegionFile(path, e) => write!(f, "cannot read region file {}: {e}", path.display()),
            Failure::Usage(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output { quiet: cli.quiet, json: cli.json, seed: cli.seed };
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(a, out),
        Command::Build(a) => commands::build(a, out),
        Command::Region(a) => commands::region(a, out),
        Command::Simulate(a) => commands::simulate(a, out),
        Command::Induce(a) => commands::induce(a, out),
        Command::Compare(a) => commands::compare(a, out),
        Command::Plot(a) => commands::plot(a, out),
        Command::Synth(a) => commands::synth(a, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
