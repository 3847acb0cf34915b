//! Space-efficient counting over non-overlapping partitions.
//!
//! Rank `i` owns a consecutive range of canonical ids and stores only the
//! effective neighbor lists of those nodes. For an edge `(v, u)` whose `u`
//! belongs to another rank, one of two schemes fetches the missing data:
//!
//! * **direct**: the rank asks the owner of `u` for `N_u` and intersects it
//!   with `N_v` itself, one outstanding request at a time;
//! * **surrogate**: the rank ships `N_v` to the owner of `u`, at most once
//!   per owner, and the owner counts every triangle `N_v` closes against its
//!   own nodes.
//!
//! Ranks announce the end of their scan with a completion broadcast, keep
//! serving until they have heard from everybody, then reduce their counts.

use crate::engine::{Algorithm, RankOutcome, RunConfig, RunMetrics};
use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::partition::{balanced_ranges, node_costs, range_bytes_nonoverlapping, NodeRange};
use crate::runtime::{self, Envelope, Message, RankContext};
use crate::seq::{intersect_count, TriangleCount};

/// Local intersections between two inbox drains in the surrogate scheme.
pub const POLL_INTERVAL: usize = 1024;

/// Maps a node to the rank whose range contains it.
#[derive(Debug, Clone)]
pub struct RangeIndex {
    ranges: Vec<NodeRange>,
    ends: Vec<usize>,
}

impl RangeIndex {
    /// `ranges` must tile `0..n` in order; empty ranges are allowed.
    pub fn new(ranges: Vec<NodeRange>) -> Self {
        let ends = ranges.iter().map(NodeRange::end).collect();
        RangeIndex { ranges, ends }
    }

    pub fn owner(&self, v: NodeId) -> usize {
        self.ends.partition_point(|&e| e <= v as usize)
    }

    pub fn range(&self, rank: usize) -> NodeRange {
        self.ranges[rank]
    }

    pub fn ranges(&self) -> &[NodeRange] {
        &self.ranges
    }
}

/// Remembers the last rank a list was sent to. Because owners are
/// non-decreasing along a sorted list, this is enough to send at most once
/// per rank.
#[derive(Debug, Default)]
struct LastProc(Option<usize>);

impl LastProc {
    fn first_visit(&mut self, rank: usize) -> bool {
        if self.0 == Some(rank) {
            false
        } else {
            self.0 = Some(rank);
            true
        }
    }
}

/// Ranks other than `me` that should receive `N_v`, in the order a scan of
/// `list` reaches them.
pub fn dedup_send_targets(list: &[NodeId], index: &RangeIndex, me: usize) -> Vec<usize> {
    let mut last = LastProc::default();
    list.iter()
        .map(|&u| index.owner(u))
        .filter(|&owner| owner != me && last.first_visit(owner))
        .collect()
}

/// Triangles closed by a received list `x = N_v` against the nodes of `core`:
/// `Σ_{u ∈ x ∩ core} |x ∩ N_u|`. Also returns the merge work done.
fn surrogate_count_with_work(g: &Graph, core: NodeRange, x: &[NodeId]) -> (TriangleCount, u64) {
    let lo = x.partition_point(|&u| (u as usize) < core.start);
    let hi = x.partition_point(|&u| (u as usize) < core.end());
    let mut t = 0;
    let mut work = 0;
    for &u in &x[lo..hi] {
        let nu = g.effective(u);
        t += intersect_count(x, nu);
        work += (x.len() + nu.len()) as u64;
    }
    (t, work)
}

pub fn surrogate_count(g: &Graph, core: NodeRange, x: &[NodeId]) -> TriangleCount {
    surrogate_count_with_work(g, core, x).0
}

fn plan(g: &Graph, cfg: &RunConfig) -> Result<RangeIndex> {
    let costs = node_costs(g, cfg.cost);
    let ranges = balanced_ranges(&costs, NodeRange::new(0, g.node_count()), cfg.ranks)?;
    Ok(RangeIndex::new(ranges))
}

fn finish(g: &Graph, cfg: &RunConfig, algorithm: Algorithm, index: &RangeIndex, out: runtime::RunOutput<RankOutcome>) -> Result<RunMetrics> {
    RunMetrics::assemble(algorithm, cfg, out, |rank| range_bytes_nonoverlapping(g, index.range(rank)))
}

pub fn count_space_surrogate(g: &Graph, cfg: &RunConfig) -> Result<RunMetrics> {
    let index = plan(g, cfg)?;
    let out = runtime::run(cfg.ranks, cfg.backend, |ctx| surrogate_rank(ctx, g, &index))?;
    finish(g, cfg, Algorithm::SpaceSurrogate, &index, out)
}

pub fn count_space_direct(g: &Graph, cfg: &RunConfig) -> Result<RunMetrics> {
    let index = plan(g, cfg)?;
    let out = runtime::run(cfg.ranks, cfg.backend, |ctx| direct_rank(ctx, g, &index))?;
    finish(g, cfg, Algorithm::SpaceDirect, &index, out)
}

struct Surrogate<'a> {
    g: &'a Graph,
    core: NodeRange,
    out: RankOutcome,
    completions: usize,
}

impl Surrogate<'_> {
    fn handle(&mut self, ctx: &mut RankContext<'_>, env: Envelope) {
        match env.msg {
            Message::Data { list, .. } => {
                let (t, work) = surrogate_count_with_work(self.g, self.core, &list);
                ctx.add_work(work);
                self.out.triangles += t;
                self.out.peak_foreign_list = self.out.peak_foreign_list.max(list.len());
            }
            Message::Completion => self.completions += 1,
            other => panic!("rank {} got unexpected {:?}", ctx.rank(), other.tag()),
        }
    }

    fn drain(&mut self, ctx: &mut RankContext<'_>) {
        while let Some(env) = ctx.try_receive() {
            self.handle(ctx, env);
        }
    }
}

fn surrogate_rank(ctx: &mut RankContext<'_>, g: &Graph, index: &RangeIndex) -> RankOutcome {
    let me = ctx.rank();
    let core = index.range(me);
    let mut st = Surrogate { g, core, out: RankOutcome::default(), completions: 0 };
    let mut since_poll = 0;
    for v in core.ids() {
        let nv = g.effective(v);
        let mut last = LastProc::default();
        for &u in nv {
            let owner = index.owner(u);
            if owner == me {
                let nu = g.effective(u);
                st.out.triangles += intersect_count(nv, nu);
                ctx.add_work((nv.len() + nu.len()) as u64);
                since_poll += 1;
                if since_poll == POLL_INTERVAL {
                    st.drain(ctx);
                    since_poll = 0;
                }
            } else if last.first_visit(owner) {
                ctx.send(owner, Message::Data { node: v, list: nv.to_vec() });
            }
        }
        st.drain(ctx);
    }
    ctx.broadcast(Message::Completion);
    while st.completions < ctx.ranks() - 1 {
        let env = ctx.receive();
        st.handle(ctx, env);
    }
    ctx.barrier();
    st.out.total = ctx.reduce_sum(st.out.triangles);
    st.out.tasks_executed = 1;
    st.out.executed.push(core);
    st.out
}

struct Direct<'a> {
    g: &'a Graph,
    completions: usize,
}

impl Direct<'_> {
    /// Serves a request or counts a completion; anything else is a protocol
    /// error.
    fn serve(&mut self, ctx: &mut RankContext<'_>, env: Envelope) {
        match env.msg {
            Message::NeighborRequest { node } => {
                let list = self.g.effective(node).to_vec();
                ctx.send(env.src, Message::Data { node, list });
            }
            Message::Completion => self.completions += 1,
            other => panic!("rank {} got unexpected {:?}", ctx.rank(), other.tag()),
        }
    }
}

fn direct_rank(ctx: &mut RankContext<'_>, g: &Graph, index: &RangeIndex) -> RankOutcome {
    let me = ctx.rank();
    let core = index.range(me);
    let mut st = Direct { g, completions: 0 };
    let mut out = RankOutcome::default();
    for v in core.ids() {
        let nv = g.effective(v);
        for &u in nv {
            let owner = index.owner(u);
            if owner == me {
                let nu = g.effective(u);
                out.triangles += intersect_count(nv, nu);
                ctx.add_work((nv.len() + nu.len()) as u64);
                continue;
            }
            ctx.send(owner, Message::NeighborRequest { node: u });
            loop {
                let env = ctx.receive();
                match env.msg {
                    Message::Data { node, list } if node == u && env.src == owner => {
                        out.triangles += intersect_count(nv, &list);
                        ctx.add_work((nv.len() + list.len()) as u64);
                        out.peak_foreign_list = out.peak_foreign_list.max(list.len());
                        break;
                    }
                    _ => st.serve(ctx, env),
                }
            }
        }
        while let Some(env) = ctx.try_receive() {
            st.serve(ctx, env);
        }
    }
    ctx.broadcast(Message::Completion);
    while st.completions < ctx.ranks() - 1 {
        let env = ctx.receive();
        st.serve(ctx, env);
    }
    ctx.barrier();
    out.total = ctx.reduce_sum(out.triangles);
    out.tasks_executed = 1;
    out.executed.push(core);
    out
}
