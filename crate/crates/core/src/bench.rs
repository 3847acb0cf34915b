//! Experiment suites and their CSV output.
//!
//! Run suites (`strong`, `weak`, `idle`) write one row per rank per run with
//! [`RUN_HEADER`] columns. `busy_time`, `idle_time` and `wall_time` are
//! seconds under the parallel backend and simulated work units under the
//! deterministic one. `speedup` is the sequential wall time divided by the
//! run's wall time for `strong`, and the first rank count's wall time divided
//! by the run's for `weak` and `idle`. A failed run produces a single row with
//! empty metric columns and the error in `status`.
//!
//! The `memory` suite writes one row per degree with [`MEMORY_HEADER`].

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use crate::engine::{count, Algorithm, RunConfig, RunMetrics};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph};
use crate::io::{generate_pa, load_graph_file, PaParams};
use crate::partition::{
    balanced_ranges, build_partition, node_costs, partition_bytes_nonoverlapping,
    partition_bytes_overlapping_estimate, range_bytes_nonoverlapping, CostFunctionKind, NodeRange,
};
use crate::runtime::Backend;

pub const RUN_HEADER: [&str; 23] = [
    "suite",
    "algo",
    "backend",
    "graph",
    "n",
    "m",
    "ranks",
    "cost",
    "seed",
    "repeat",
    "rank",
    "triangles",
    "data_msgs_sent",
    "bytes_sent",
    "requests_sent",
    "tasks_executed",
    "busy_time",
    "idle_time",
    "idle_fraction",
    "partition_bytes",
    "wall_time",
    "speedup",
    "status",
];

pub const MEMORY_HEADER: [&str; 7] = [
    "d",
    "n",
    "m",
    "partitions",
    "bytes_nonoverlap_max",
    "bytes_overlap_max",
    "ratio",
];

pub const PARTITION_STATS_HEADER: [&str; 5] =
    ["rank", "core_len", "edges", "bytes_nonoverlap", "bytes_overlap_estimate"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Strong,
    Weak,
    Memory,
    Idle,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Strong => "strong",
            Suite::Weak => "weak",
            Suite::Memory => "memory",
            Suite::Idle => "idle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::Strong, Suite::Weak, Suite::Memory, Suite::Idle]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub suite: Suite,
    pub algos: Vec<Algorithm>,
    pub ranks_list: Vec<usize>,
    /// `None` picks each algorithm's default.
    pub cost: Option<CostFunctionKind>,
    pub backend: Backend,
    /// Input graph for `strong` and `idle`; a PA graph is generated otherwise.
    pub graph: Option<PathBuf>,
    /// PA node count (`weak`: nodes per rank).
    pub n: usize,
    pub d: usize,
    pub d_list: Vec<usize>,
    pub seed: u64,
    pub repeats: usize,
    pub static_only: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            suite: Suite::Strong,
            algos: vec![Algorithm::SpaceSurrogate, Algorithm::Dynamic],
            ranks_list: vec![2, 4, 8],
            cost: None,
            backend: Backend::det(0),
            graph: None,
            n: 100_000,
            d: 20,
            d_list: (1..=10).map(|i| 10 * i).collect(),
            seed: 1,
            repeats: 1,
            static_only: false,
        }
    }
}

pub fn default_cost(algo: Algorithm) -> CostFunctionKind {
    match algo {
        Algorithm::Dynamic => CostFunctionKind::Degree,
        _ => CostFunctionKind::PredSum,
    }
}

struct Input {
    name: String,
    graph: Graph,
}

fn pa_input(n: usize, d: usize, seed: u64) -> Result<Input> {
    let raw = generate_pa(&PaParams::new(n, d, seed))?;
    Ok(Input {
        name: format!("pa-n{n}-d{d}-s{seed}"),
        graph: build_graph(&raw),
    })
}

fn load_input(cfg: &BenchConfig) -> Result<Input> {
    match &cfg.graph {
        Some(path) => Ok(Input {
            name: path.display().to_string(),
            graph: load_graph_file(path)?,
        }),
        None => pa_input(cfg.n, cfg.d, cfg.seed),
    }
}

/// Per-run context shared by every row of that run.
struct RunKey<'a> {
    suite: Suite,
    algo: String,
    input: &'a Input,
    cfg: RunConfig,
    repeat: usize,
}

fn backend_seed(b: Backend) -> String {
    match b {
        Backend::Deterministic { seed } => seed.to_string(),
        Backend::Parallel => String::new(),
    }
}

fn run_prefix(k: &RunKey<'_>) -> Vec<String> {
    vec![
        k.suite.name().to_string(),
        k.algo.clone(),
        k.cfg.backend.name().to_string(),
        k.input.name.clone(),
        k.input.graph.node_count().to_string(),
        k.input.graph.edge_count().to_string(),
        k.cfg.ranks.to_string(),
        k.cfg.cost.name().to_string(),
        backend_seed(k.cfg.backend),
        k.repeat.to_string(),
    ]
}

/// Rows for one run: per-rank metrics, or one error row.
pub fn run_rows(
    suite: &str,
    graph_name: &str,
    g: &Graph,
    m: &RunMetrics,
    repeat: usize,
    speedup: Option<f64>,
) -> Vec<Vec<String>> {
    let algo = algo_label(m.algorithm, m.config.static_only);
    m.ranks
        .iter()
        .map(|r| {
            vec![
                suite.to_string(),
                algo.clone(),
                m.config.backend.name().to_string(),
                graph_name.to_string(),
                g.node_count().to_string(),
                g.edge_count().to_string(),
                m.config.ranks.to_string(),
                m.config.cost.name().to_string(),
                backend_seed(m.config.backend),
                repeat.to_string(),
                r.rank.to_string(),
                r.triangles.to_string(),
                r.runtime.data_msgs_sent.to_string(),
                r.runtime.bytes_sent.to_string(),
                r.runtime.requests_sent().to_string(),
                r.tasks_executed.to_string(),
                r.runtime.busy_time.to_string(),
                r.runtime.idle_time.to_string(),
                format!("{:.6}", r.runtime.idle_fraction()),
                r.partition_bytes.to_string(),
                m.wall_time.to_string(),
                speedup.map(|s| format!("{s:.4}")).unwrap_or_default(),
                "ok".to_string(),
            ]
        })
        .collect()
}

fn error_row(k: &RunKey<'_>, err: &Error) -> Vec<String> {
    let mut row = run_prefix(k);
    row.resize(RUN_HEADER.len() - 1, String::new());
    row.push(format!("error: {err}"));
    row
}

fn algo_label(algo: Algorithm, static_only: bool) -> String {
    if algo == Algorithm::Dynamic && static_only {
        "dynamic-static".to_string()
    } else {
        algo.name().to_string()
    }
}

/// Per-rank CSV of one run, header included.
pub fn write_run_csv<W: Write>(out: W, graph_name: &str, g: &Graph, m: &RunMetrics) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER).map_err(csv_err)?;
    for row in run_rows("count", graph_name, g, m, 0, None) {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

/// Runs the configured suite, writing CSV to `out`.
pub fn run_benchmark<W: Write>(cfg: &BenchConfig, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match cfg.suite {
        Suite::Memory => memory_suite(cfg, &mut w)?,
        Suite::Strong => {
            w.write_record(RUN_HEADER).map_err(csv_err)?;
            let input = load_input(cfg)?;
            let seq = count(&input.graph, Algorithm::Seq, &RunConfig::new(1, CostFunctionKind::Unit, cfg.backend))?;
            run_matrix(cfg, &mut w, &input, &cfg.algos, |_| Some(seq.wall_time))?;
        }
        Suite::Idle => {
            w.write_record(RUN_HEADER).map_err(csv_err)?;
            let input = load_input(cfg)?;
            run_matrix(cfg, &mut w, &input, &[Algorithm::Dynamic], |_| None)?;
        }
        Suite::Weak => {
            w.write_record(RUN_HEADER).map_err(csv_err)?;
            for &ranks in &cfg.ranks_list {
                let input = pa_input(ranks * cfg.n, cfg.d, cfg.seed)?;
                let single = BenchConfig { ranks_list: vec![ranks], ..cfg.clone() };
                run_matrix(&single, &mut w, &input, &cfg.algos, |_| None)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Every (algo, P, repeat) over one input. With no fixed baseline, speedup is
/// relative to the first successful run of the same algorithm.
fn run_matrix<W: Write>(
    cfg: &BenchConfig,
    w: &mut csv::Writer<W>,
    input: &Input,
    algos: &[Algorithm],
    baseline: impl Fn(Algorithm) -> Option<f64>,
) -> Result<()> {
    for &algo in algos {
        let mut first: Option<f64> = baseline(algo);
        for &ranks in &cfg.ranks_list {
            for repeat in 0..cfg.repeats.max(1) {
                let run_cfg = RunConfig::new(ranks, cfg.cost.unwrap_or(default_cost(algo)), cfg.backend)
                    .static_only(cfg.static_only);
                let key = RunKey {
                    suite: cfg.suite,
                    algo: algo_label(algo, cfg.static_only),
                    input,
                    cfg: run_cfg,
                    repeat,
                };
                match count(&input.graph, algo, &run_cfg) {
                    Ok(m) => {
                        let base = *first.get_or_insert(m.wall_time);
                        let speedup = (m.wall_time > 0.0).then(|| base / m.wall_time);
                        for row in run_rows(cfg.suite.name(), &input.name, &input.graph, &m, repeat, speedup) {
                            w.write_record(&row).map_err(csv_err)?;
                        }
                    }
                    Err(e) => w.write_record(error_row(&key, &e)).map_err(csv_err)?,
                }
            }
        }
    }
    Ok(())
}

/// Largest per-partition byte counts under both storage models.
pub fn memory_maxima(g: &Graph, cost: CostFunctionKind, partitions: usize) -> Result<(u64, u64)> {
    let costs = node_costs(g, cost);
    let ranges = balanced_ranges(&costs, NodeRange::new(0, g.node_count()), partitions)?;
    let mut non = 0;
    let mut over = 0;
    for &core in &ranges {
        non = non.max(range_bytes_nonoverlapping(g, core));
        over = over.max(partition_bytes_overlapping_estimate(g, core));
    }
    Ok((non, over))
}

fn memory_suite<W: Write>(cfg: &BenchConfig, w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(MEMORY_HEADER).map_err(csv_err)?;
    let partitions = cfg.ranks_list.last().copied().unwrap_or(16);
    let cost = cfg.cost.unwrap_or(CostFunctionKind::PredSum);
    for &d in &cfg.d_list {
        let input = pa_input(cfg.n, d, cfg.seed)?;
        let g = &input.graph;
        let (non, over) = memory_maxima(g, cost, partitions)?;
        w.write_record([
            d.to_string(),
            g.node_count().to_string(),
            g.edge_count().to_string(),
            partitions.to_string(),
            non.to_string(),
            over.to_string(),
            format!("{:.4}", over as f64 / non as f64),
        ])
        .map_err(csv_err)?;
    }
    Ok(())
}

/// Per-partition statistics for `g` split into `ranks` ranges.
pub fn write_partition_stats<W: Write>(g: &Graph, cost: CostFunctionKind, ranks: usize, out: W) -> Result<()> {
    let costs = node_costs(g, cost);
    let ranges = balanced_ranges(&costs, NodeRange::new(0, g.node_count()), ranks)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PARTITION_STATS_HEADER).map_err(csv_err)?;
    for (rank, &core) in ranges.iter().enumerate() {
        let p = build_partition(g, core, rank);
        w.write_record([
            rank.to_string(),
            core.len.to_string(),
            p.edge_count().to_string(),
            partition_bytes_nonoverlapping(&p).to_string(),
            partition_bytes_overlapping_estimate(g, core).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(bytes: &[u8]) -> Vec<Vec<String>> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(bytes)
            .records()
            .map(|r| r.unwrap().iter().map(str::to_string).collect())
            .collect()
    }

    fn small(suite: Suite) -> BenchConfig {
        BenchConfig {
            suite,
            n: 400,
            d: 6,
            d_list: vec![4, 8, 16],
            ranks_list: vec![2, 3, 5],
            ..Default::default()
        }
    }

    #[test]
    fn strong_suite_rows_agree() {
        let mut buf = Vec::new();
        run_benchmark(&small(Suite::Strong), &mut buf).unwrap();
        let rows = read(&buf);
        assert_eq!(rows[0], RUN_HEADER);
        // 2 algos × (2 + 3 + 5) ranks
        assert_eq!(rows.len(), 1 + 2 * 10);
        assert!(rows[1..].iter().all(|r| r.len() == RUN_HEADER.len() && r[22] == "ok"));

        let total = |algo: &str, ranks: &str| -> u64 {
            rows[1..]
                .iter()
                .filter(|r| r[1] == algo && r[6] == ranks)
                .map(|r| r[11].parse::<u64>().unwrap())
                .sum()
        };
        let t = total("dynamic", "2");
        for p in ["2", "3", "5"] {
            assert_eq!(total("dynamic", p), t);
            assert_eq!(total("space-surrogate", p), t);
        }
    }

    #[test]
    fn failed_runs_become_status_rows() {
        let cfg = BenchConfig {
            algos: vec![Algorithm::Dynamic],
            ranks_list: vec![1],
            ..small(Suite::Idle)
        };
        let mut buf = Vec::new();
        run_benchmark(&cfg, &mut buf).unwrap();
        let rows = read(&buf);
        assert_eq!(rows.len(), 2);
        assert!(rows[1][22].starts_with("error:"));
        assert_eq!(rows[1].len(), RUN_HEADER.len());
    }

    #[test]
    fn memory_suite_shape() {
        let mut buf = Vec::new();
        run_benchmark(&BenchConfig { ranks_list: vec![4], ..small(Suite::Memory) }, &mut buf).unwrap();
        let rows = read(&buf);
        assert_eq!(rows[0], MEMORY_HEADER);
        assert_eq!(rows.len(), 4);
        let ratios: Vec<f64> = rows[1..].iter().map(|r| r[6].parse().unwrap()).collect();
        assert!(ratios.iter().all(|&r| r > 1.0));
        assert!(ratios[2] > ratios[0]);
    }

    #[test]
    fn weak_suite_scales_input() {
        let cfg = BenchConfig { algos: vec![Algorithm::Dynamic], ranks_list: vec![2, 4], n: 100, ..small(Suite::Weak) };
        let mut buf = Vec::new();
        run_benchmark(&cfg, &mut buf).unwrap();
        let rows = read(&buf);
        assert_eq!(rows[1][4], "200");
        assert_eq!(rows.last().unwrap()[4], "400");
    }

    #[test]
    fn partition_stats_columns() {
        let g = build_graph(&generate_pa(&PaParams::new(200, 6, 1)).unwrap());
        let mut buf = Vec::new();
        write_partition_stats(&g, CostFunctionKind::Unit, 4, &mut buf).unwrap();
        let rows = read(&buf);
        assert_eq!(rows[0], PARTITION_STATS_HEADER);
        assert_eq!(rows.len(), 5);
        let edges: usize = rows[1..].iter().map(|r| r[2].parse::<usize>().unwrap()).sum();
        assert_eq!(edges, g.edge_count());
    }
}
