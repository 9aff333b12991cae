//! `facloc`: generate instances, run local search, compute exact optima,
//! check approximation certificates and sweep benchmark suites.
//!
//! Exit codes: 0 success, 1 usage, 2 bad input, 3 oracle guard refused,
//! 4 a certificate or bound check failed.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use facloc::instances::RandomMode;
use facloc::ProblemKind;

#[derive(Debug, Parser)]
#[command(name = "facloc", version, about = "Local search for metric facility location")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an instance file (torus lower-bound family or random).
    Gen(GenArgs),
    /// Run local search.
    Solve(SolveArgs),
    /// Exhaustive optimum.
    Oracle(OracleArgs),
    /// Local search, optimum and every applicable certificate.
    Certify(CertifyArgs),
    /// Sweep random instances and emit one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Euclidean,
    Graph,
}

impl From<ModeArg> for RandomMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Euclidean => RandomMode::EuclideanUnitSquare,
            ModeArg::Graph => RandomMode::RandomGraphClosure,
        }
    }
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: facloc::Error| e.to_string())
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Torus lower-bound instance instead of a random one.
    #[arg(long)]
    torus: bool,
    /// Torus side length (even).
    #[arg(long = "N", value_name = "N", required_if_eq("torus", "true"))]
    side: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of points of a random instance.
    #[arg(long, required_unless_present = "torus")]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "euclidean")]
    mode: ModeArg,
    #[arg(long, value_parser = parse_kind, default_value = "kmedian")]
    problem: ProblemKind,
    #[arg(long)]
    k: Option<usize>,
    /// Opening costs are drawn uniformly from [LO, HI] (default [0, diameter]).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    cost_range: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Instance file; standard input when omitted.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Override the problem kind stored in the instance.
    #[arg(long, value_parser = parse_kind)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Largest swap size.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Relative improvement a move must achieve.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random, all, a named set of the instance (odd, even) or a file.
    #[arg(long, default_value = "random")]
    initial: String,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Write the move trace as JSON lines.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Compare against this solution instead of the exhaustive optimum.
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_kind, default_value = "kmedian")]
    problem: ProblemKind,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Defaults to 2 for the kinds that need it.
    #[arg(long)]
    k: Option<usize>,
    /// Defaults to 2 for lp.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Run i uses seed + i for both the instance and the search start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "euclidean")]
    mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON run report here.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::USAGE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => commands::gen(a).map(|_| true),
        Command::Solve(a) => commands::solve(a).map(|_| true),
        Command::Oracle(a) => commands::oracle(a).map(|_| true),
        Command::Certify(a) => commands::certify(a),
        Command::Bench(a) => commands::bench(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(error::CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
