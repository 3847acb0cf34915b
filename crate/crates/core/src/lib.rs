//! Exact triangle counting on undirected graphs: a sequential baseline, two
//! space-efficient distributed schemes over non-overlapping partitions, and a
//! coordinator/worker scheme with dynamic load balancing, all running on an
//! in-process message-passing runtime.

pub mod bench;
pub mod cli;
pub mod dynamic;
pub mod engine;
mod error;
pub mod graph;
pub mod io;
pub mod partition;
pub mod runtime;
pub mod seq;
pub mod space;

pub use engine::{count, Algorithm, RankReport, RunConfig, RunMetrics};
pub use error::{Error, Result};
pub use graph::{build_graph, graph_from_edges, Graph, NodeId, RawGraph};
pub use partition::CostFunctionKind;
pub use runtime::Backend;
pub use seq::{count_triangles_seq, TriangleCount};
