//! Sequential counting over the degree-ordered graph, plus a brute-force
//! oracle on the adjacency matrix.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Exact number of distinct triangles.
pub type TriangleCount = u64;

/// Largest graph the brute-force oracle accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 2000;

/// `|a ∩ b|` for two strictly ascending lists, by linear merge.
#[inline]
pub fn intersect_count(a: &[NodeId], b: &[NodeId]) -> u64 {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]), "unsorted input");
    debug_assert!(b.windows(2).all(|w| w[0] < w[1]), "unsorted input");
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            count += 1;
            i += 1;
            j += 1;
        }
    }
    count
}

/// Triangles whose lowest-ordered node lies in `range`.
pub fn count_range(g: &Graph, range: std::ops::Range<NodeId>) -> TriangleCount {
    let mut total = 0;
    for v in range {
        let nv = g.effective(v);
        for &u in nv {
            total += intersect_count(nv, g.effective(u));
        }
    }
    total
}

pub fn count_triangles_seq(g: &Graph) -> TriangleCount {
    count_range(g, 0..g.node_count() as NodeId)
}

/// Counts triples `u < v < w` that are pairwise adjacent, testing adjacency on
/// a dense bit matrix built from the full neighbor lists.
pub fn count_triangles_brute(g: &Graph) -> Result<TriangleCount> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::invalid(format!(
            "brute-force oracle limited to {BRUTE_FORCE_MAX_NODES} nodes, graph has {n}"
        )));
    }
    let words = n.div_ceil(64);
    let mut matrix = vec![0u64; n * words];
    for u in 0..n {
        for &w in g.neighbors(u as NodeId) {
            matrix[u * words + w as usize / 64] |= 1 << (w % 64);
        }
    }
    let row = |u: usize| &matrix[u * words..(u + 1) * words];
    let mut total = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            if row(u)[v / 64] >> (v % 64) & 1 == 0 {
                continue;
            }
            // common neighbors w > v
            let (ru, rv) = (row(u), row(v));
            let first = (v + 1) / 64;
            for k in first..words {
                let mut bits = ru[k] & rv[k];
                if k == first {
                    bits &= u64::MAX.checked_shl(((v + 1) % 64) as u32).unwrap_or(0);
                }
                total += bits.count_ones() as u64;
            }
        }
    }
    Ok(total)
}
