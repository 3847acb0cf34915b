//! Edge-list ingestion/export and synthetic graph generators.
//!
//! Text format: whitespace-separated node pairs, one edge per line. Lines whose
//! first non-blank character is `#` are comments; blank lines are ignored.
//!
//! Generators use `ChaCha8Rng` seeded with `seed_from_u64`, so outputs are
//! stable across platforms for a given seed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_graph, normalize, Graph, RawGraph};

pub fn load_edge_list<R: Read>(reader: R) -> Result<RawGraph> {
    let mut reader = BufReader::new(reader);
    let mut line = String::new();
    let mut edges = Vec::new();
    let mut lineno = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        lineno += 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tokens = body.split_whitespace();
        while let Some(first) = tokens.next() {
            let Some(second) = tokens.next() else {
                return Err(Error::Parse {
                    line: lineno,
                    message: "odd number of node ids".into(),
                });
            };
            edges.push((parse_id(first, lineno)?, parse_id(second, lineno)?));
        }
    }
    Ok(RawGraph::from_edges(edges))
}

fn parse_id(token: &str, line: usize) -> Result<u64> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid node id {token:?}"),
    })
}

pub fn load_edge_list_file(path: impl AsRef<Path>) -> Result<RawGraph> {
    load_edge_list(File::open(path)?)
}

/// Loads, normalizes and builds the graph in `path`.
pub fn load_graph_file(path: impl AsRef<Path>) -> Result<Graph> {
    Ok(build_graph(&normalize(&load_edge_list_file(path)?)))
}

/// Writes canonical edges `u v` (`u < v`) in ascending lexicographic order.
pub fn export_edge_list<W: Write>(g: &Graph, sink: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(sink);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

/// Writes a raw graph's edges by original label, one `lo hi` pair per line,
/// deduplicated and sorted.
pub fn export_raw_edge_list<W: Write>(raw: &RawGraph, sink: W) -> std::io::Result<()> {
    let mut pairs: Vec<(u64, u64)> = raw
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| {
            let (a, b) = (raw.label(u as usize), raw.label(v as usize));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut out = BufWriter::new(sink);
    for (u, v) in pairs {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}

/// Preferential-attachment parameters: `n` nodes, target average degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaParams {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

impl PaParams {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        PaParams { n, d, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 || !self.d.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "PA average degree must be even and >= 2, got {}",
                self.d
            )));
        }
        if self.n <= self.d {
            return Err(Error::invalid(format!(
                "PA node count must exceed the average degree (n={}, d={})",
                self.n, self.d
            )));
        }
        Ok(())
    }
}

/// Barabási–Albert style generator.
///
/// Starts from a clique on `d/2 + 1` nodes; every later node attaches `d/2`
/// edges to distinct existing nodes picked with probability proportional to
/// their current degree (a duplicate pick is redrawn). The result has
/// `m = n·d/2 − (d/2)(d/2 + 1)/2` edges.
pub fn generate_pa(p: &PaParams) -> Result<RawGraph> {
    p.validate()?;
    let k = p.d / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let m = p.n * k - k * (k + 1) / 2;
    let mut edges = Vec::with_capacity(m);
    // every edge contributes both endpoints; a uniform pick is degree-proportional
    let mut endpoints: Vec<u64> = Vec::with_capacity(2 * m);
    for u in 0..=k as u64 {
        for v in u + 1..=k as u64 {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets = Vec::with_capacity(k);
    for v in (k + 1) as u64..p.n as u64 {
        targets.clear();
        while targets.len() < k {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Ok(RawGraph { n: p.n, edges, labels: Vec::new() })
}

/// Erdős–Rényi `G(n, p)`.
pub fn generate_gnp(n: usize, p: f64, seed: u64) -> RawGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u64 {
        for v in u + 1..n as u64 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    RawGraph { n, edges, labels: Vec::new() }
}

pub fn write_raw_edge_list_file(raw: &RawGraph, path: impl AsRef<Path>) -> Result<()> {
    export_raw_edge_list(raw, File::create(path)?)?;
    Ok(())
}
