//! Degree-ordered graph representation.
//!
//! Nodes are relabeled so that canonical ids follow the total order
//! `u ≺ v ⟺ d_u < d_v ∨ (d_u = d_v ∧ label_u < label_v)`. After relabeling,
//! comparing two canonical ids is the same as comparing them under that order,
//! and every edge is stored once, in the effective adjacency list of its
//! lower endpoint.

use std::collections::HashMap;

/// Canonical node id.
pub type NodeId = u32;

/// An undirected edge list with arbitrary non-negative labels.
///
/// `labels` maps a compact id back to the label it had in the input. It is
/// empty for graphs that were never normalized, in which case every id is its
/// own label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub n: usize,
    pub edges: Vec<(u64, u64)>,
    pub labels: Vec<u64>,
}

impl RawGraph {
    pub fn from_edges(edges: Vec<(u64, u64)>) -> Self {
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0) as usize;
        RawGraph { n, edges, labels: Vec::new() }
    }

    pub fn label(&self, id: usize) -> u64 {
        self.labels.get(id).copied().unwrap_or(id as u64)
    }
}

/// Removes self-loops and duplicate undirected edges, and compacts endpoints to
/// `0..n` in first-seen order. The returned edges are `(lo, hi)` pairs sorted
/// lexicographically.
pub fn normalize(raw: &RawGraph) -> RawGraph {
    let mut compact: HashMap<u64, u64> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for &(u, v) in &raw.edges {
        if u == v {
            continue;
        }
        let mut id = |x: u64| {
            *compact.entry(x).or_insert_with(|| {
                labels.push(raw.label(x as usize));
                (labels.len() - 1) as u64
            })
        };
        let (a, b) = (id(u), id(v));
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();
    RawGraph { n: labels.len(), edges, labels }
}

/// Immutable CSR graph in canonical (≺) order.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    m: usize,
    full_offsets: Vec<usize>,
    full_adj: Vec<NodeId>,
    eff_offsets: Vec<usize>,
    eff_adj: Vec<NodeId>,
    /// canonical id -> original label
    labels: Vec<u64>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// All neighbors of `v`, ascending.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.full_adj[self.full_offsets[v]..self.full_offsets[v + 1]]
    }

    /// Effective adjacency `N_v`: neighbors that follow `v` in ≺, ascending.
    pub fn effective(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.eff_adj[self.eff_offsets[v]..self.eff_offsets[v + 1]]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.full_offsets[v + 1] - self.full_offsets[v]
    }

    pub fn effective_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.eff_offsets[v + 1] - self.eff_offsets[v]
    }

    pub fn max_effective_degree(&self) -> usize {
        (0..self.n as NodeId)
            .map(|v| self.effective_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Original label of a canonical node.
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    /// Canonical id of an original label, if the label is part of the graph.
    pub fn canonical_of(&self, label: u64) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|c| c as NodeId)
    }

    /// Original label -> canonical id.
    pub fn relabel_map(&self) -> HashMap<u64, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(c, &l)| (l, c as NodeId))
            .collect()
    }

    /// Canonical edges `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n as NodeId).flat_map(move |v| self.effective(v).iter().map(move |&u| (v, u)))
    }

    pub(crate) fn effective_offsets(&self) -> &[usize] {
        &self.eff_offsets
    }
}

/// `u ≺ v` on canonical ids.
#[inline]
pub fn precedes(u: NodeId, v: NodeId) -> bool {
    u < v
}

/// Builds the degree-ordered graph. Input that is not already normalized
/// (sorted `(lo, hi)` pairs, no loops or duplicates, ids below `raw.n`) goes
/// through [`normalize`] first. For normalized input, isolated nodes (ids
/// below `raw.n` that appear in no edge) are kept with degree zero.
pub fn build_graph(raw: &RawGraph) -> Graph {
    if is_normalized(raw) {
        build_normalized(raw)
    } else {
        build_normalized(&normalize(raw))
    }
}

fn is_normalized(raw: &RawGraph) -> bool {
    raw.edges.iter().all(|&(u, v)| u < v && (v as usize) < raw.n)
        && raw.edges.windows(2).all(|w| w[0] < w[1])
}

fn build_normalized(raw: &RawGraph) -> Graph {
    let n = raw.n;
    let mut degree = vec![0usize; n];
    for &(u, v) in &raw.edges {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&x| (degree[x], raw.label(x)));
    let mut canon = vec![0 as NodeId; n];
    for (c, &x) in order.iter().enumerate() {
        canon[x] = c as NodeId;
    }
    let labels: Vec<u64> = order.iter().map(|&x| raw.label(x)).collect();

    let mut full_offsets = vec![0usize; n + 1];
    for (x, &d) in degree.iter().enumerate() {
        full_offsets[canon[x] as usize + 1] = d;
    }
    for i in 0..n {
        full_offsets[i + 1] += full_offsets[i];
    }
    let mut cursor = full_offsets.clone();
    let mut full_adj = vec![0 as NodeId; full_offsets[n]];
    for &(u, v) in &raw.edges {
        let (cu, cv) = (canon[u as usize], canon[v as usize]);
        full_adj[cursor[cu as usize]] = cv;
        cursor[cu as usize] += 1;
        full_adj[cursor[cv as usize]] = cu;
        cursor[cv as usize] += 1;
    }
    for v in 0..n {
        full_adj[full_offsets[v]..full_offsets[v + 1]].sort_unstable();
    }

    let mut eff_offsets = Vec::with_capacity(n + 1);
    let mut eff_adj = Vec::with_capacity(raw.edges.len());
    eff_offsets.push(0);
    for v in 0..n {
        let adj = &full_adj[full_offsets[v]..full_offsets[v + 1]];
        let first_higher = adj.partition_point(|&u| u <= v as NodeId);
        eff_adj.extend_from_slice(&adj[first_higher..]);
        eff_offsets.push(eff_adj.len());
    }

    Graph {
        n,
        m: eff_adj.len(),
        full_offsets,
        full_adj,
        eff_offsets,
        eff_adj,
        labels,
    }
}

/// Convenience: normalize then build.
pub fn graph_from_edges(edges: impl IntoIterator<Item = (u64, u64)>) -> Graph {
    build_graph(&normalize(&RawGraph::from_edges(edges.into_iter().collect())))
}
