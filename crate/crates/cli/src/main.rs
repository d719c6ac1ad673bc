//! Command-line harness: load or generate matrices, square them through
//! the pipeline, run Galerkin products, compare pre-allocation strategies,
//! and benchmark the merge variants.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "rowbin", version, about = "Four-stage SpGEMM pipeline harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Square a matrix (C = A * A) through the pipeline.
    Square(SquareArgs),
    /// Coarsen a stencil matrix through triple products R * A * P.
    Galerkin(GalerkinArgs),
    /// Benchmark the merge algorithm candidates.
    Mergebench(MergebenchArgs),
    /// Compare memory footprints of the pre-allocation strategies.
    Memreport(MemreportArgs),
}

#[derive(Args, Clone)]
struct MatrixSource {
    /// Matrix Market file to load.
    #[arg(long, value_name = "MTX")]
    input: Option<PathBuf>,
    /// Generated stencil matrix, e.g. 2d5pt:64x64 or 3d7pt:16x16x16.
    #[arg(long, value_name = "SPEC", conflicts_with = "input")]
    stencil: Option<String>,
    /// Expand symmetric Matrix Market files to general storage.
    #[arg(long)]
    expand_symmetric: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Hybrid,
    Upper,
    Precise,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecisionArg {
    F32,
    F64,
}

#[derive(Args)]
struct SquareArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, value_enum, default_value = "hybrid")]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "f64")]
    precision: PrecisionArg,
    /// Check the result against the reference multiplication; exits 2 on
    /// mismatch.
    #[arg(long)]
    verify: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for anything randomized (accepted for interface stability).
    #[arg(long, default_value = "1")]
    seed: u64,
    /// Write reports as JSON lines.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the result table as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Both,
    RaThenP,
    ApThenR,
}

#[derive(Args)]
struct GalerkinArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, value_enum, default_value = "both")]
    order: OrderArg,
    /// Coarsening levels to build.
    #[arg(long, default_value = "3")]
    levels: usize,
    /// Rows aggregated per coarse unknown.
    #[arg(long, default_value = "4")]
    block: usize,
    #[arg(long, value_enum, default_value = "f64")]
    precision: PrecisionArg,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "1")]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PayloadArg {
    None,
    U32,
    U64,
    All,
}

#[derive(Args)]
struct MergebenchArgs {
    /// Comma-separated sub-sequence lengths (powers of two, 16..=4096).
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128, 256, 512, 1024, 2048, 4096])]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "all")]
    payload: PayloadArg,
    /// Timed repetitions; the best is reported.
    #[arg(long, default_value = "3")]
    trials: usize,
    /// Total elements per repetition.
    #[arg(long, default_value_t = 1 << 22)]
    total_elements: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "1")]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct MemreportArgs {
    /// Matrix Market files; repeatable.
    #[arg(long, value_name = "MTX")]
    input: Vec<PathBuf>,
    /// Stencil specs; repeatable.
    #[arg(long, value_name = "SPEC")]
    stencil: Vec<String>,
    #[arg(long)]
    expand_symmetric: bool,
    #[arg(long, value_enum, default_value = "f64")]
    precision: PrecisionArg,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "1")]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

/// Exit 1 for usage and I/O problems, 2 for verification mismatches.
#[derive(Debug)]
enum CliError {
    Usage(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Usage(e)
    }
}

fn with_thread_pool<T>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError>
where
    T: Send,
{
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Usage(anyhow::anyhow!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Square(args) => with_thread_pool(args.threads, || commands::square::run(&args)),
        Command::Galerkin(args) => {
            with_thread_pool(args.threads, || commands::galerkin::run(&args))
        }
        Command::Mergebench(args) => {
            with_thread_pool(args.threads, || commands::mergebench::run(&args))
        }
        Command::Memreport(args) => {
            with_thread_pool(args.threads, || commands::memreport::run(&args))
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
