//! `specproj`: synthesize banded test matrices, compute spectral projectors
//! in HODLR form, and check them against dense oracles.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "specproj", version, about = "Spectral projectors of banded symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic banded matrix with prescribed spectrum to an SBM file
    Generate(GenerateArgs),
    /// Compute the projector onto the negative invariant subspace
    Project(ProjectArgs),
    /// Like `project`, plus accuracy against a dense eigensolver
    Verify(VerifyArgs),
    /// Ranks and errors over a grid of gaps and truncation tolerances (CSV)
    Rankscan(RankscanArgs),
    /// Time and memory over a list of sizes (CSV)
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Bandwidth
    #[arg(long, default_value_t = 1)]
    pub band: usize,
    /// Eigenvalues fill [-1, -gap] and [gap, 1]
    #[arg(long, default_value_t = 1e-1)]
    pub gap: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Leaf size of the partition; defaults to 250 for b = 1 and 500 otherwise
    #[arg(long)]
    pub nmin: Option<usize>,
    /// Truncation tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    /// Stopping tolerance on |1 - l_k|
    #[arg(long, default_value_t = 1e-15)]
    pub delta: f64,
    /// Compute the projector of A - shift * I
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// JSON report path (stdout when omitted)
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write P densely as whitespace-separated rows (n up to the oracle cap)
    #[arg(long)]
    pub dump_projector: Option<PathBuf>,
    /// Write the rotations of the first step as little-endian (u32, u32, f64, f64) records
    #[arg(long)]
    pub dump_givens: Option<PathBuf>,
    #[arg(long)]
    pub oracle_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Largest n for the dense oracle (default 4096, or SPECPROJ_ORACLE_CAP)
    #[arg(long)]
    pub oracle_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RankscanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub band: usize,
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-5,1e-10,1e-15")]
    pub gaps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1e-10")]
    pub eps_list: Vec<f64>,
    #[arg(long)]
    pub nmin: Option<usize>,
    #[arg(long, default_value_t = 1e-15)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub oracle_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub band: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub gap: f64,
    /// Runs per size; the fastest is reported
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long)]
    pub nmin: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Project(a) => commands::project(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Rankscan(a) => commands::rankscan(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
