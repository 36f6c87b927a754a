//! Command-line front end for the simulation toolkit.
//!
//! Subcommands: `grow` (replica farm with per-checkpoint outputs), `sweep`
//! (assortativity table over a p-list), `theory` (exact evaluators),
//! `compare` (simulation vs theory with verdicts), `assortativity` (r from a
//! saved edge list) and `probdump` (per-vertex attachment probabilities).
//!
//! Exit codes: 0 success, 2 usage error, 3 comparison failure, 4 I/O error.
//! Errors print a single machine-parsable line `error[CODE]: message`.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CommaList;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compare(String),
    Io(String),
}

impl CliError {
    fn tag(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Compare(_) => "E_COMPARE",
            CliError::Io(_) => "E_IO",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compare(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Compare(m) | CliError::Io(m) => m,
        }
    }
}

impl From<paapa::Error> for CliError {
    fn from(err: paapa::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

#[derive(Parser)]
#[command(name = "paapa", version, about = "Mixed preferential / anti-preferential attachment toolkit")]
struct Cli {
    /// Flat key=value file mirroring the long flags; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow replica graphs; emit per-checkpoint histograms, a mean-degree
    /// trajectory, optional edge lists and metadata.
    Grow(GrowArgs),
    /// Reproduce the assortativity-vs-p table over a list of mixing
    /// probabilities.
    Sweep(SweepArgs),
    /// Exact theory evaluators (no simulation).
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Grow, then compare the final histogram against the limiting law with
    /// pass/fail verdicts.
    Compare(CompareArgs),
    /// Assortativity of a saved edge list.
    Assortativity(AssortativityArgs),
    /// Per-vertex attachment probabilities at checkpoints (probability vs
    /// vertex age).
    Probdump(ProbdumpArgs),
}

/// Flags shared by every simulating subcommand.
#[derive(Args, Clone, Default)]
struct ModelFlags {
    /// Edges per new vertex.
    #[arg(long)]
    m: Option<u32>,
    /// Anti-preferential regime probability in [0, 1].
    #[arg(long)]
    p: Option<f64>,
    /// Horizon T (final vertex count).
    #[arg(long)]
    t: Option<u64>,
    /// Model variant: pa-apa or pa-apa-2.
    #[arg(long)]
    variant: Option<String>,
    /// Base seed; replica r runs on a seed derived from (seed, r).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent replicas.
    #[arg(long)]
    replicas: Option<u32>,
}

#[derive(Args)]
struct GrowArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Comma-separated observation times within 1..=T.
    #[arg(long)]
    checkpoints: Option<CommaList<u64>>,
    /// Vertex whose mean degree the trajectory tracks.
    #[arg(long)]
    vertex: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one edge-list CSV per replica.
    #[arg(long = "edge-list")]
    edge_list: bool,
    /// Worker threads for the replica farm (default: rayon's choice).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Comma-separated mixing probabilities.
    #[arg(long = "p-list")]
    p_list: Option<CommaList<f64>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Limiting degree law P(k) up to kmax (CSV `k,P_k`).
    LimitLaw(TheoryArgs),
    /// Expected degree E[d(v_i, t)] along checkpoints (CSV `t,expected_degree`).
    ExpectedDegree(TheoryArgs),
    /// Exact degree law of one vertex at one time (CSV `k,prob`).
    ExactLaw(TheoryArgs),
    /// Exact degree proportions P(k, t) averaged over vertices (CSV `k,prob`).
    MixtureLaw(TheoryArgs),
}

#[derive(Args)]
struct TheoryArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Largest degree tabulated.
    #[arg(long)]
    kmax: Option<u64>,
    /// Vertex index i for per-vertex evaluators.
    #[arg(long)]
    vertex: Option<u64>,
    /// Comma-separated times for trajectory evaluators.
    #[arg(long)]
    checkpoints: Option<CommaList<u64>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Largest degree in the reference law table.
    #[arg(long)]
    kmax: Option<u64>,
    /// Total-variation tolerance.
    #[arg(long = "tv-tol")]
    tv_tol: Option<f64>,
    /// Chi-square significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Tail-exponent tolerance (pdf exponent vs (p-3)/(1-p)).
    #[arg(long = "tail-tol")]
    tail_tol: Option<f64>,
    /// Smallest degree entering the tail fit.
    #[arg(long)]
    kmin: Option<u64>,
    /// Smallest cell count entering the tail fit.
    #[arg(long = "min-count")]
    min_count: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AssortativityArgs {
    /// Edge-list CSV (`step,source,target`) to analyze.
    #[arg(long = "edge-list")]
    edge_list: Option<PathBuf>,
    /// Optional output directory for the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProbdumpArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Comma-separated dump times within 1..=T.
    #[arg(long)]
    checkpoints: Option<CommaList<u64>>,
    /// Rule to evaluate: preferential, anti-preferential or
    /// anti-preferential-maxdeg (default: the variant's anti rule).
    #[arg(long)]
    rule: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::Config::load(cli.config.as_deref()).and_then(|config| match cli.command {
        Command::Grow(args) => commands::grow(args, &config),
        Command::Sweep(args) => commands::sweep(args, &config),
        Command::Theory(args) => commands::theory(args, &config),
        Command::Compare(args) => commands::compare(args, &config),
        Command::Assortativity(args) => commands::assortativity(args, &config),
        Command::Probdump(args) => commands::probdump(args, &config),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error[{}]: {}", err.tag(), err.message());
            ExitCode::from(err.code())
        }
    }
}
