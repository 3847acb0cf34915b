//! Algorithm selection, run configuration and the per-run report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{graph_bytes_effective, CostFunctionKind, NodeRange};
use crate::runtime::{Backend, RankMetrics, RunOutput, TraceEvent};
use crate::seq::{intersect_count, TriangleCount};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Seq,
    SpaceDirect,
    SpaceSurrogate,
    Dynamic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Seq,
        Algorithm::SpaceDirect,
        Algorithm::SpaceSurrogate,
        Algorithm::Dynamic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Seq => "seq",
            Algorithm::SpaceDirect => "space-direct",
            Algorithm::SpaceSurrogate => "space-surrogate",
            Algorithm::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub ranks: usize,
    pub cost: CostFunctionKind,
    pub backend: Backend,
    /// Dynamic algorithm only: split everything up front, hand out nothing.
    pub static_only: bool,
}

impl RunConfig {
    pub fn new(ranks: usize, cost: CostFunctionKind, backend: Backend) -> Self {
        RunConfig { ranks, cost, backend, static_only: false }
    }

    pub fn static_only(mut self, on: bool) -> Self {
        self.static_only = on;
        self
    }
}

/// What a rank program hands back to the driver.
#[derive(Debug, Clone, Default)]
pub(crate) struct RankOutcome {
    pub triangles: TriangleCount,
    /// Reduction result; set on rank 0 only.
    pub total: Option<TriangleCount>,
    pub tasks_executed: u64,
    pub executed: Vec<NodeRange>,
    /// Longest neighbor list this rank held on behalf of another rank.
    pub peak_foreign_list: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub triangles: TriangleCount,
    pub tasks_executed: u64,
    /// Node ranges this rank counted, in execution order.
    pub executed: Vec<NodeRange>,
    /// Bytes of graph data the rank keeps resident.
    pub partition_bytes: u64,
    pub peak_foreign_list: usize,
    pub runtime: RankMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub algorithm: Algorithm,
    pub config: RunConfig,
    pub total: TriangleCount,
    /// Seconds, or simulated work units under the deterministic backend.
    pub wall_time: f64,
    pub ranks: Vec<RankReport>,
    pub trace: Vec<TraceEvent>,
}

impl RunMetrics {
    pub(crate) fn assemble(
        algorithm: Algorithm,
        config: &RunConfig,
        out: RunOutput<RankOutcome>,
        partition_bytes: impl Fn(usize) -> u64,
    ) -> Result<RunMetrics> {
        let total = out.results[0]
            .total
            .ok_or_else(|| Error::invalid("rank 0 returned no reduction result"))?;
        let ranks = out
            .results
            .into_iter()
            .zip(out.metrics)
            .enumerate()
            .map(|(rank, (o, m))| RankReport {
                rank,
                triangles: o.triangles,
                tasks_executed: o.tasks_executed,
                executed: o.executed,
                partition_bytes: partition_bytes(rank),
                peak_foreign_list: o.peak_foreign_list,
                runtime: m,
            })
            .collect();
        Ok(RunMetrics {
            algorithm,
            config: *config,
            total,
            wall_time: out.wall_time,
            ranks,
            trace: out.trace,
        })
    }

    pub fn data_msgs_sent(&self) -> u64 {
        self.ranks.iter().map(|r| r.runtime.data_msgs_sent).sum()
    }

    pub fn bytes_sent(&self) -> u64 {
        self.ranks.iter().map(|r| r.runtime.bytes_sent).sum()
    }

    pub fn requests_sent(&self) -> u64 {
        self.ranks.iter().map(|r| r.runtime.requests_sent()).sum()
    }

    pub fn max_partition_bytes(&self) -> u64 {
        self.ranks.iter().map(|r| r.partition_bytes).max().unwrap_or(0)
    }

    /// Mean idle fraction over the ranks that do counting work.
    pub fn mean_idle_fraction(&self) -> f64 {
        let counting: Vec<&RankReport> = match self.algorithm {
            Algorithm::Dynamic => self.ranks.iter().skip(1).collect(),
            _ => self.ranks.iter().collect(),
        };
        if counting.is_empty() {
            return 0.0;
        }
        counting.iter().map(|r| r.runtime.idle_fraction()).sum::<f64>() / counting.len() as f64
    }
}

/// Runs `algorithm` on `g`. `Seq` ignores everything in `cfg` except the
/// backend's time unit.
pub fn count(g: &Graph, algorithm: Algorithm, cfg: &RunConfig) -> Result<RunMetrics> {
    match algorithm {
        Algorithm::Seq => Ok(count_seq(g, cfg)),
        Algorithm::SpaceDirect => crate::space::count_space_direct(g, cfg),
        Algorithm::SpaceSurrogate => crate::space::count_space_surrogate(g, cfg),
        Algorithm::Dynamic => crate::dynamic::count_dynamic(g, cfg),
    }
}

fn count_seq(g: &Graph, cfg: &RunConfig) -> RunMetrics {
    let started = Instant::now();
    let mut total = 0;
    let mut work = 0u64;
    for v in 0..g.node_count() as u32 {
        let nv = g.effective(v);
        for &u in nv {
            let nu = g.effective(u);
            total += intersect_count(nv, nu);
            work += (nv.len() + nu.len()) as u64;
        }
    }
    let time = if cfg.backend.is_deterministic() {
        work as f64
    } else {
        started.elapsed().as_secs_f64()
    };
    let runtime = RankMetrics {
        work_units: work,
        busy_time: time,
        data_sent_to: vec![0],
        ..Default::default()
    };
    RunMetrics {
        algorithm: Algorithm::Seq,
        config: RunConfig { ranks: 1, ..*cfg },
        total,
        wall_time: time,
        ranks: vec![RankReport {
            rank: 0,
            triangles: total,
            tasks_executed: 1,
            executed: vec![NodeRange::new(0, g.node_count())],
            partition_bytes: graph_bytes_effective(g),
            peak_foreign_list: 0,
            runtime,
        }],
        trace: Vec::new(),
    }
}
