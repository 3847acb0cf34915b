//! Cost functions, balanced consecutive-range splitting, and non-overlapping
//! partitions.
//!
//! Partition sizes use a CSR cost model with 8-byte words: one offset per
//! stored node plus a trailing sentinel, and one word per stored neighbor entry.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub const WORD_SIZE: u64 = 8;

/// Per-node work estimate `f(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostFunctionKind {
    /// `f(v) = 1`
    Unit,
    /// `f(v) = d_v`
    Degree,
    /// `f(v) = Σ_{u ∈ N_v} (d̂_v + d̂_u)`
    SuccSum,
    /// `f(v) = Σ_{u ∈ 𝒩_v − N_v} (d̂_v + d̂_u)`: the cost of every intersection
    /// that lands on the owner of `v` when lists are shipped to the owner of
    /// the higher endpoint.
    PredSum,
}

impl CostFunctionKind {
    pub const ALL: [CostFunctionKind; 4] = [
        CostFunctionKind::Unit,
        CostFunctionKind::Degree,
        CostFunctionKind::SuccSum,
        CostFunctionKind::PredSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostFunctionKind::Unit => "unit",
            CostFunctionKind::Degree => "degree",
            CostFunctionKind::SuccSum => "succsum",
            CostFunctionKind::PredSum => "predsum",
        }
    }
}

impl fmt::Display for CostFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostFunctionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown cost function {s:?}")))
    }
}

pub fn node_costs(g: &Graph, kind: CostFunctionKind) -> Vec<u64> {
    let n = g.node_count() as NodeId;
    let dhat = |v: NodeId| g.effective_degree(v) as u64;
    match kind {
        CostFunctionKind::Unit => vec![1; n as usize],
        CostFunctionKind::Degree => (0..n).map(|v| g.degree(v) as u64).collect(),
        CostFunctionKind::SuccSum => (0..n)
            .map(|v| g.effective(v).iter().map(|&u| dhat(v) + dhat(u)).sum())
            .collect(),
        CostFunctionKind::PredSum => (0..n)
            .map(|v| {
                let all = g.neighbors(v);
                let lower = &all[..all.partition_point(|&u| u < v)];
                lower.iter().map(|&u| dhat(v) + dhat(u)).sum()
            })
            .collect(),
    }
}

/// A run of consecutive canonical ids `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeRange {
    pub start: usize,
    pub len: usize,
}

impl NodeRange {
    pub fn new(start: usize, len: usize) -> Self {
        NodeRange { start, len }
    }

    pub fn from_bounds(start: usize, end: usize) -> Self {
        NodeRange { start, len: end - start }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        (self.start..self.end()).contains(&(v as usize))
    }

    pub fn ids(&self) -> Range<NodeId> {
        self.start as NodeId..self.end() as NodeId
    }
}

/// Splits `span` into `k` consecutive ranges of roughly equal cost.
///
/// Boundary `j` (for `j = 1..k`) sits at the smallest offset whose cost prefix
/// reaches `j · total / k`. Every range then costs less than
/// `total / k + max f`. Ranges may be empty when `k` exceeds the span length.
pub fn balanced_ranges(costs: &[u64], span: NodeRange, k: usize) -> Result<Vec<NodeRange>> {
    if k == 0 {
        return Err(Error::invalid("number of ranges must be positive"));
    }
    if span.end() > costs.len() {
        return Err(Error::invalid(format!(
            "span {}..{} exceeds {} nodes",
            span.start,
            span.end(),
            costs.len()
        )));
    }
    let mut prefix = Vec::with_capacity(span.len + 1);
    prefix.push(0u128);
    for &c in &costs[span.start..span.end()] {
        prefix.push(prefix.last().unwrap() + c as u128);
    }
    let total = *prefix.last().unwrap();
    let kk = k as u128;

    let mut ranges = Vec::with_capacity(k);
    let mut lo = 0usize;
    for j in 1..k as u128 {
        let hi = prefix.partition_point(|&p| p * kk < j * total).max(lo);
        ranges.push(NodeRange::from_bounds(span.start + lo, span.start + hi));
        lo = hi;
    }
    ranges.push(NodeRange::from_bounds(span.start + lo, span.end()));
    Ok(ranges)
}

/// Rank `i`'s share of the graph: `N_v` for every `v` in its core range.
#[derive(Debug, Clone)]
pub struct Partition<'g> {
    pub rank: usize,
    pub core: NodeRange,
    graph: &'g Graph,
    boundary: Vec<NodeId>,
}

impl<'g> Partition<'g> {
    pub fn neighbors(&self, v: NodeId) -> &'g [NodeId] {
        debug_assert!(self.core.contains(v));
        self.graph.effective(v)
    }

    /// `|E_i'|`
    pub fn edge_count(&self) -> usize {
        let offsets = self.graph.effective_offsets();
        offsets[self.core.end()] - offsets[self.core.start]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.core
            .ids()
            .flat_map(move |v| self.graph.effective(v).iter().map(move |&u| (v, u)))
    }

    /// `V_i' − V_i`, ascending.
    pub fn boundary(&self) -> &[NodeId] {
        &self.boundary
    }
}

pub fn build_partition(g: &Graph, core: NodeRange, rank: usize) -> Partition<'_> {
    assert!(core.end() <= g.node_count(), "core range outside graph");
    let mut boundary: Vec<NodeId> = core
        .ids()
        .flat_map(|v| g.effective(v).iter().copied())
        .filter(|&u| !core.contains(u))
        .collect();
    boundary.sort_unstable();
    boundary.dedup();
    Partition { rank, core, graph: g, boundary }
}

/// Builds the `k` cost-balanced partitions over the whole node set.
pub fn partition_graph(g: &Graph, kind: CostFunctionKind, k: usize) -> Result<Vec<Partition<'_>>> {
    let costs = node_costs(g, kind);
    let ranges = balanced_ranges(&costs, NodeRange::new(0, g.node_count()), k)?;
    Ok(ranges
        .into_iter()
        .enumerate()
        .map(|(rank, core)| build_partition(g, core, rank))
        .collect())
}

/// `WORD_SIZE · (|V_i| + 1 + |E_i'|)`
pub fn partition_bytes_nonoverlapping(p: &Partition<'_>) -> u64 {
    range_bytes_nonoverlapping(p.graph, p.core)
}

/// Same as [`partition_bytes_nonoverlapping`] without building the partition.
pub fn range_bytes_nonoverlapping(g: &Graph, core: NodeRange) -> u64 {
    let offsets = g.effective_offsets();
    let edges = offsets[core.end()] - offsets[core.start];
    WORD_SIZE * (core.len as u64 + 1 + edges as u64)
}

/// Size of the overlapping partition a closure-based scheme would store for
/// `core`: every node in `core ∪ ⋃_{v ∈ core} 𝒩_v` together with its full
/// neighbor list.
pub fn partition_bytes_overlapping_estimate(g: &Graph, core: NodeRange) -> u64 {
    let mut in_closure = vec![false; g.node_count()];
    let mut nodes = 0u64;
    let mut entries = 0u64;
    let mut add = |x: NodeId| {
        if !in_closure[x as usize] {
            in_closure[x as usize] = true;
            nodes += 1;
            entries += g.degree(x) as u64;
        }
    };
    for v in core.ids() {
        add(v);
        for &u in g.neighbors(v) {
            add(u);
        }
    }
    WORD_SIZE * (nodes + 1 + entries)
}

/// CSR bytes of the effective adjacency of the whole graph.
pub fn graph_bytes_effective(g: &Graph) -> u64 {
    WORD_SIZE * (g.node_count() as u64 + 1 + g.edge_count() as u64)
}

/// CSR bytes of the full (both-direction) adjacency of the whole graph.
pub fn graph_bytes_full(g: &Graph) -> u64 {
    WORD_SIZE * (g.node_count() as u64 + 1 + 2 * g.edge_count() as u64)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;
    use crate::graph::{build_graph, graph_from_edges, normalize};
    use crate::io::{generate_gnp, generate_pa, PaParams};

    fn k3() -> Graph {
        graph_from_edges([(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn k3_costs() {
        let g = k3();
        assert_eq!(node_costs(&g, CostFunctionKind::Unit), vec![1, 1, 1]);
        assert_eq!(node_costs(&g, CostFunctionKind::Degree), vec![2, 2, 2]);
        assert_eq!(node_costs(&g, CostFunctionKind::PredSum), vec![0, 3, 3]);
        assert_eq!(node_costs(&g, CostFunctionKind::SuccSum), vec![5, 1, 0]);
    }

    #[test]
    fn succsum_and_predsum_totals_agree_on_pa() {
        let g = build_graph(&normalize(&generate_pa(&PaParams::new(1000, 10, 2)).unwrap()));
        // brute force: each edge (v, u) with u ∈ N_v contributes d̂_v + d̂_u
        let expected: u64 = g
            .edges()
            .map(|(v, u)| (g.effective_degree(v) + g.effective_degree(u)) as u64)
            .sum();
        let succ: u64 = node_costs(&g, CostFunctionKind::SuccSum).iter().sum();
        let pred: u64 = node_costs(&g, CostFunctionKind::PredSum).iter().sum();
        assert_eq!(succ, expected);
        assert_eq!(pred, expected);
    }

    #[test]
    fn ranges_uniform() {
        let r = balanced_ranges(&[1; 10], NodeRange::new(0, 10), 2).unwrap();
        assert_eq!(r, vec![NodeRange::new(0, 5), NodeRange::new(5, 5)]);
    }

    #[test]
    fn ranges_heavy_head() {
        let r = balanced_ranges(&[9, 1, 1, 1], NodeRange::new(0, 4), 2).unwrap();
        assert_eq!(r, vec![NodeRange::new(0, 1), NodeRange::new(1, 3)]);
    }

    #[test]
    fn ranges_more_parts_than_nodes() {
        let r = balanced_ranges(&[1, 1], NodeRange::new(0, 2), 4).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.iter().map(|x| x.len).sum::<usize>(), 2);
        assert!(r.iter().any(NodeRange::is_empty));
    }

    #[test]
    fn ranges_reject_zero_parts_and_bad_span() {
        assert!(balanced_ranges(&[1, 2], NodeRange::new(0, 2), 0).is_err());
        assert!(balanced_ranges(&[1, 2], NodeRange::new(1, 2), 1).is_err());
    }

    #[test]
    fn ranges_on_subspan() {
        let r = balanced_ranges(&[5, 1, 1, 1, 1, 9], NodeRange::new(1, 4), 2).unwrap();
        assert_eq!(r, vec![NodeRange::new(1, 2), NodeRange::new(3, 2)]);
    }

    #[test]
    fn k3_partitions() {
        let g = k3();
        let p0 = build_partition(&g, NodeRange::new(0, 2), 0);
        let p1 = build_partition(&g, NodeRange::new(2, 1), 1);
        assert_eq!(p0.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(p1.edge_count(), 0);
        assert_eq!(p0.boundary(), &[2]);
        assert_eq!(partition_bytes_nonoverlapping(&p0), (2 + 1 + 3) * WORD_SIZE);
    }

    #[test]
    fn empty_core_costs_one_word() {
        let g = k3();
        let p = build_partition(&g, NodeRange::new(1, 0), 0);
        assert_eq!(partition_bytes_nonoverlapping(&p), WORD_SIZE);
    }

    #[test]
    fn single_partition_is_whole_graph() {
        let g = build_graph(&normalize(&generate_gnp(30, 0.3, 5)));
        let parts = partition_graph(&g, CostFunctionKind::PredSum, 1).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert_eq!(partition_bytes_nonoverlapping(&parts[0]), graph_bytes_effective(&g));
        let whole = NodeRange::new(0, g.node_count());
        assert_eq!(partition_bytes_overlapping_estimate(&g, whole), graph_bytes_full(&g));
    }

    #[test]
    fn star_leaf_closure_is_nearly_whole_graph() {
        let g = graph_from_edges((1..=50).map(|leaf| (0, leaf)));
        let leaf = NodeRange::new(0, 1);
        let estimate = partition_bytes_overlapping_estimate(&g, leaf);
        // leaf + center; the center's list alone holds every edge
        assert_eq!(estimate, WORD_SIZE * (2 + 1 + 1 + 50));
        assert!(estimate >= WORD_SIZE * g.edge_count() as u64);
        let p = build_partition(&g, leaf, 0);
        assert_eq!(partition_bytes_nonoverlapping(&p), WORD_SIZE * (1 + 1 + 1));
    }

    #[test]
    fn nonoverlapping_bytes_sum() {
        let g = build_graph(&normalize(&generate_gnp(60, 0.2, 8)));
        for k in [1, 2, 3, 7] {
            let parts = partition_graph(&g, CostFunctionKind::PredSum, k).unwrap();
            let sum: u64 = parts.iter().map(partition_bytes_nonoverlapping).sum();
            assert_eq!(sum, graph_bytes_effective(&g) + (k as u64 - 1) * WORD_SIZE);
        }
    }

    #[test]
    fn cost_names_round_trip() {
        for k in CostFunctionKind::ALL {
            assert_eq!(k.name().parse::<CostFunctionKind>().unwrap(), k);
        }
        assert!("bogus".parse::<CostFunctionKind>().is_err());
    }

    /// Linear-scan reference for the boundary rule.
    fn reference_ranges(costs: &[u64], k: usize) -> Vec<NodeRange> {
        let total: u128 = costs.iter().map(|&c| c as u128).sum();
        let mut bounds = vec![0];
        for j in 1..k as u128 {
            let mut acc = 0u128;
            let mut b = 0;
            while acc * (k as u128) < j * total {
                acc += costs[b] as u128;
                b += 1;
            }
            bounds.push(b.max(*bounds.last().unwrap()));
        }
        bounds.push(costs.len());
        bounds.windows(2).map(|w| NodeRange::from_bounds(w[0], w[1])).collect()
    }

    proptest! {
        #[test]
        fn ranges_match_reference_and_bound(
            costs in proptest::collection::vec(0u64..50, 1..200),
            k in 1usize..12,
        ) {
            let span = NodeRange::new(0, costs.len());
            let ranges = balanced_ranges(&costs, span, k).unwrap();
            prop_assert_eq!(&ranges, &reference_ranges(&costs, k));
            prop_assert_eq!(ranges.first().unwrap().start, 0);
            prop_assert_eq!(ranges.last().unwrap().end(), costs.len());
            for w in ranges.windows(2) {
                prop_assert_eq!(w[0].end(), w[1].start);
            }
            let total: u64 = costs.iter().sum();
            let max = *costs.iter().max().unwrap();
            for r in &ranges {
                let c: u64 = costs[r.start..r.end()].iter().sum();
                prop_assert!(c <= total.div_ceil(k as u64) + max);
            }
        }

        #[test]
        fn partitions_are_edge_disjoint_and_covering(
            n in 2usize..80,
            p in 0.05f64..0.5,
            seed in any::<u64>(),
            k in prop_oneof![Just(1usize), Just(2), Just(3), Just(7)],
            kind in prop_oneof![
                Just(CostFunctionKind::Unit),
                Just(CostFunctionKind::Degree),
                Just(CostFunctionKind::SuccSum),
                Just(CostFunctionKind::PredSum),
            ],
        ) {
            let g = build_graph(&normalize(&generate_gnp(n, p, seed)));
            let parts = partition_graph(&g, kind, k).unwrap();
            let mut seen = HashSet::new();
            for part in &parts {
                for e in part.edges() {
                    prop_assert!(seen.insert(e), "edge {:?} in two partitions", e);
                }
                let ov = partition_bytes_overlapping_estimate(&g, part.core);
                prop_assert!(partition_bytes_nonoverlapping(part) <= ov);
            }
            prop_assert_eq!(seen.len(), g.edge_count());
            let all: HashSet<_> = g.edges().collect();
            prop_assert_eq!(seen, all);
        }
    }
}
