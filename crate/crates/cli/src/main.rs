//! `spmttkrp` command-line harness: generate, inspect and benchmark tensors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "spmttkrp", version, about = "Sparse MTTKRP over mode-specific COO tensor copies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build plans under a scheme policy, time all modes and write a JSON report.
    Run(RunArgs),
    /// Write a synthetic tensor in FROSTT format.
    Gen(GenArgs),
    /// Report shape, per-mode scheme choice, balance and memory estimate.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Adaptive,
    S1,
    S2,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Cyclic,
    Lpt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    F32,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DistributionArg {
    Uniform,
    Skewed,
}

#[derive(Args)]
pub struct TensorArgs {
    #[arg(long)]
    pub tensor: PathBuf,
    /// Reject duplicate index tuples instead of summing them.
    #[arg(long)]
    pub strict: bool,
    /// Explicit extents, comma separated; defaults to the largest index per mode.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
}

#[derive(Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: TensorArgs,
    #[arg(long, default_value_t = 32)]
    pub rank: usize,
    /// Partitions per mode and worker count; defaults to the logical core count.
    #[arg(long, env = "SPMTTKRP_WORKERS")]
    pub kappa: Option<usize>,
    /// Nonzeros per virtual thread-block batch (P).
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Adaptive)]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value_t = StrategyArg::Cyclic)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = PrecisionArg::F32)]
    pub precision: PrecisionArg,
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    /// Seed for the uniform (0, 1] factor initialisation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare every mode against the sequential reference.
    #[arg(long)]
    pub verify: bool,
    /// Execute partitions sequentially in partition order.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long)]
    pub nnz: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DistributionArg::Uniform)]
    pub distribution: DistributionArg,
    /// Mode that receives few distinct coordinates (skewed only).
    #[arg(long, default_value_t = 1)]
    pub skew_mode: usize,
    /// Number of distinct coordinates in the skewed mode.
    #[arg(long, default_value_t = 2)]
    pub hot: usize,
    #[arg(long, value_enum, default_value_t = PrecisionArg::F32)]
    pub precision: PrecisionArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub input: TensorArgs,
    #[arg(long, default_value_t = 32)]
    pub rank: usize,
    #[arg(long, env = "SPMTTKRP_WORKERS")]
    pub kappa: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Cyclic)]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = PrecisionArg::F32)]
    pub precision: PrecisionArg,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Gen(args) => commands::gen(&args).map(|_| ExitCode::SUCCESS),
        Command::Inspect(args) => commands::inspect(&args).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
