mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "bimod", version, about = "Directed community detection by bimodularity")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a stochastic block-cycle graph and its ground truth.
    Generate(GenerateArgs),
    /// Singular value decomposition of the modularity matrix.
    Decompose(DecomposeArgs),
    /// Edge embedding, k-means and bicommunity extraction.
    Detect(DetectArgs),
    /// Connectome report from an edge list and a neuron metadata table.
    Celegans(CelegansArgs),
    /// Compare a detection against generator ground truth.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// TOML or JSON generator spec.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_blocks: Option<usize>,
    #[arg(long)]
    nodes_per_block: Option<usize>,
    #[arg(long)]
    p_self: Option<f64>,
    #[arg(long)]
    p_con: Option<f64>,
    #[arg(long)]
    p_dir: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Edge list (.tsv, .csv or Matrix Market .mtx).
    graph: PathBuf,
    /// Add every reversed edge before analysis.
    #[arg(long)]
    symmetrize: bool,
    /// Force the dense operator.
    #[arg(long, conflicts_with = "implicit")]
    dense: bool,
    /// Force the matrix-free operator.
    #[arg(long)]
    implicit: bool,
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(short = 'n', long)]
    components: Option<usize>,
    /// Eigendecomposition of the symmetrized operator instead of the SVD.
    #[arg(long)]
    baseline: bool,
    /// Also write the dense modularity matrix as Matrix Market.
    #[arg(long)]
    export_operator: bool,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(short = 'n', long)]
    components: Option<usize>,
    #[arg(short = 'k', long)]
    clusters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Debug, Args)]
struct CelegansArgs {
    edges: PathBuf,
    /// CSV with columns label,category[,position].
    metadata: PathBuf,
    #[arg(short = 'n', long)]
    components: Option<usize>,
    #[arg(short = 'k', long)]
    clusters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Bicommunities flagged as top-ranked.
    #[arg(long)]
    top: Option<usize>,
    /// Position histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    strip_self_loops: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// bicommunities.json or edge_clusters.csv from `detect`.
    detection: PathBuf,
    /// ground_truth.json from `generate`.
    ground_truth: PathBuf,
    /// Write the metrics here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() -> bimod_core::Result<()> {
    let Ok(value) = std::env::var("BIMOD_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| bimod_core::Error::Argument(format!("BIMOD_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| bimod_core::Error::Argument(format!("thread pool: {e}")))
}

fn exit_code(e: &bimod_core::Error) -> u8 {
    use bimod_core::Error;
    match e {
        Error::Argument(_) => 2,
        Error::NonConvergence { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = init_threads().and_then(|()| match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Detect(a) => commands::detect(a),
        Command::Celegans(a) => commands::celegans(a),
        Command::Eval(a) => commands::eval(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
