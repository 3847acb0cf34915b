//! Command-line interface. Exit codes: 0 ok, 1 usage, 2 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{default_cost, run_benchmark, write_partition_stats, write_run_csv, BenchConfig, Suite};
use crate::engine::{count, Algorithm, RunConfig};
use crate::error::{Error, Result};
use crate::io::{generate_pa, load_graph_file, write_raw_edge_list_file, PaParams};
use crate::partition::CostFunctionKind;
use crate::runtime::Backend;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tricount", version, about = "Exact triangle counting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count triangles in an edge-list file.
    Count(CountArgs),
    /// Write a preferential-attachment graph as an edge list.
    GeneratePa(GenerateArgs),
    /// Per-partition sizes as CSV.
    PartitionStats(PartitionArgs),
    /// Run an experiment suite and emit CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    ranks: usize,
    /// Defaults to predsum for the space-efficient schemes, degree for dynamic.
    #[arg(long, value_parser = parse_cost)]
    cost: Option<CostFunctionKind>,
    #[arg(long, default_value = "det", value_parser = ["det", "par"])]
    backend: String,
    /// Scheduler seed for the deterministic backend.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dynamic only: split all nodes up front and hand out no further tasks.
    #[arg(long)]
    static_only: bool,
    /// Write per-rank metrics CSV here.
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    ranks: usize,
    #[arg(long, default_value = "predsum", value_parser = parse_cost)]
    cost: CostFunctionKind,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    /// Comma-separated algorithms for run suites.
    #[arg(long, value_delimiter = ',', value_parser = parse_algo)]
    algos: Vec<Algorithm>,
    /// Comma-separated rank counts; the memory suite uses the last as its partition count.
    #[arg(long, value_delimiter = ',')]
    ranks_list: Vec<usize>,
    #[arg(long, value_parser = parse_cost)]
    cost: Option<CostFunctionKind>,
    #[arg(long, default_value = "det", value_parser = ["det", "par"])]
    backend: String,
    #[arg(long, default_value_t = 0)]
    backend_seed: u64,
    /// Input graph for strong and idle suites; PA(n, d) otherwise.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, value_delimiter = ',')]
    d_list: Vec<usize>,
    /// PA generator seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    static_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algo(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cost(s: &str) -> std::result::Result<CostFunctionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn backend(name: &str, seed: u64) -> Backend {
    match name {
        "par" => Backend::Parallel,
        _ => Backend::det(seed),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Count(a) => {
            if a.static_only && a.algo != Algorithm::Dynamic {
                return Err(Error::InvalidArgument("--static-only applies to --algo dynamic only".into()));
            }
            let g = load_graph_file(&a.graph)?;
            let cfg = RunConfig::new(a.ranks, a.cost.unwrap_or(default_cost(a.algo)), backend(&a.backend, a.seed))
                .static_only(a.static_only);
            let m = count(&g, a.algo, &cfg)?;
            writeln!(out, "triangles,{}", m.total)?;
            writeln!(out, "data_msgs_sent,{}", m.data_msgs_sent())?;
            writeln!(out, "bytes_sent,{}", m.bytes_sent())?;
            writeln!(out, "requests_sent,{}", m.requests_sent())?;
            writeln!(out, "max_partition_bytes,{}", m.max_partition_bytes())?;
            writeln!(out, "wall_time,{}", m.wall_time)?;
            if let Some(path) = a.metrics_out {
                let name = a.graph.display().to_string();
                write_run_csv(BufWriter::new(File::create(path)?), &name, &g, &m)?;
            }
        }
        Command::GeneratePa(a) => {
            let raw = generate_pa(&PaParams::new(a.n, a.d, a.seed))?;
            write_raw_edge_list_file(&raw, &a.out)?;
        }
        Command::PartitionStats(a) => {
            if a.ranks == 0 {
                return Err(Error::InvalidArgument("--ranks must be positive".into()));
            }
            let g = load_graph_file(&a.graph)?;
            write_partition_stats(&g, a.cost, a.ranks, out)?;
        }
        Command::Bench(a) => {
            let defaults = BenchConfig::default();
            let cfg = BenchConfig {
                suite: a.suite,
                algos: if a.algos.is_empty() { defaults.algos } else { a.algos },
                ranks_list: if a.ranks_list.is_empty() { defaults.ranks_list } else { a.ranks_list },
                cost: a.cost,
                backend: backend(&a.backend, a.backend_seed),
                graph: a.graph,
                n: a.n,
                d: a.d,
                d_list: if a.d_list.is_empty() { defaults.d_list } else { a.d_list },
                seed: a.seed,
                repeats: a.repeats,
                static_only: a.static_only,
            };
            match a.out {
                Some(path) => run_benchmark(&cfg, BufWriter::new(File::create(path)?))?,
                None => run_benchmark(&cfg, out)?,
            }
        }
    }
    Ok(())
}
