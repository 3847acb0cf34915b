//! C ABI for the tricount engine.
//!
//! Graphs and run reports are opaque heap handles owned by the caller and
//! released with [`tc_graph_free`] and [`tc_report_free`]. Every fallible
//! function returns a [`TcStatus`]; on failure, [`tc_last_error_message`]
//! describes the most recent error on the calling thread. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tricount::io::{generate_pa, load_graph_file, PaParams};
use tricount::{build_graph, count, Algorithm, Backend, CostFunctionKind, Error, Graph, RawGraph, RunConfig, RunMetrics};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Runtime = 5,
    Panic = 6,
}

/// Values for [`TcRunOptions::algorithm`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcAlgorithm {
    Seq = 0,
    SpaceDirect = 1,
    SpaceSurrogate = 2,
    Dynamic = 3,
}

/// Values for [`TcRunOptions::cost`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcCost {
    Unit = 0,
    Degree = 1,
    SuccSum = 2,
    PredSum = 3,
}

/// Values for [`TcRunOptions::backend`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcBackend {
    Deterministic = 0,
    Parallel = 1,
}

/// Enum-valued fields are plain integers so that out-of-range values from C
/// are rejected instead of being undefined behavior.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcRunOptions {
    /// A [`TcAlgorithm`] value.
    pub algorithm: u32,
    pub ranks: u32,
    /// A [`TcCost`] value.
    pub cost: u32,
    /// A [`TcBackend`] value.
    pub backend: u32,
    /// Scheduler seed for the deterministic backend.
    pub seed: u64,
    /// Dynamic algorithm only: no tasks handed out after the initial split.
    pub static_only: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcRankMetrics {
    pub rank: u64,
    pub triangles: u64,
    pub data_msgs_sent: u64,
    pub bytes_sent: u64,
    pub requests_sent: u64,
    pub tasks_executed: u64,
    pub partition_bytes: u64,
    /// Seconds, or simulated work units under the deterministic backend.
    pub busy_time: f64,
    pub idle_time: f64,
}

/// Opaque graph handle.
pub struct TcGraph(Graph);

/// Opaque run report handle.
pub struct TcReport(RunMetrics);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> TcStatus {
    match err {
        Error::Parse { .. } => TcStatus::Parse,
        Error::InvalidArgument(_) => TcStatus::InvalidArgument,
        Error::Io(_) => TcStatus::Io,
        Error::Runtime(_) => TcStatus::Runtime,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (TcStatus, String)>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&msg);
            TcStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (TcStatus, String) {
    (TcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> (TcStatus, String) {
    (TcStatus::InvalidArgument, msg)
}

fn hand_out<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a graph from `edge_count` pairs stored flat in `pairs`
/// (`u0, v0, u1, v1, ...`). Loops and duplicates are dropped.
///
/// # Safety
/// `pairs` must point to `2 * edge_count` readable values (it may be null
/// when `edge_count` is 0), and `out` must be a valid place to store a handle.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_from_edges(
    pairs: *const u64,
    edge_count: usize,
    out: *mut *mut TcGraph,
) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        if pairs.is_null() && edge_count > 0 {
            return Err(null_err("pairs"));
        }
        let flat = if edge_count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(pairs, 2 * edge_count)
        };
        let edges = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        hand_out(out, TcGraph(build_graph(&RawGraph::from_edges(edges))));
        Ok(())
    })
}

/// Loads a whitespace-separated edge list.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid place to store a
/// handle.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_load_file(path: *const c_char, out: *mut *mut TcGraph) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        if path.is_null() {
            return Err(null_err("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8".into()))?;
        hand_out(out, TcGraph(load_graph_file(path).map_err(lib_err)?));
        Ok(())
    })
}

/// Generates a preferential-attachment graph with `n` nodes and average
/// degree about `d` (even, at least 2).
///
/// # Safety
/// `out` must be a valid place to store a handle.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_generate_pa(n: usize, d: usize, seed: u64, out: *mut *mut TcGraph) -> TcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let raw = generate_pa(&PaParams::new(n, d, seed)).map_err(lib_err)?;
        hand_out(out, TcGraph(build_graph(&raw)));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_free(graph: *mut TcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_node_count(graph: *const TcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_graph_edge_count(graph: *const TcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Sequential triangle count.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_count_triangles(graph: *const TcGraph, out: *mut u64) -> TcStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null_err("graph"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = tricount::count_triangles_seq(&g.0);
        Ok(())
    })
}

/// Sequential algorithm, one rank, deterministic backend with seed 0.
#[no_mangle]
pub extern "C" fn tc_run_options_default() -> TcRunOptions {
    TcRunOptions {
        algorithm: TcAlgorithm::Seq as u32,
        ranks: 1,
        cost: TcCost::PredSum as u32,
        backend: TcBackend::Deterministic as u32,
        seed: 0,
        static_only: false,
    }
}

fn decode(o: &TcRunOptions) -> Result<(Algorithm, RunConfig), (TcStatus, String)> {
    let algorithm = match o.algorithm {
        0 => Algorithm::Seq,
        1 => Algorithm::SpaceDirect,
        2 => Algorithm::SpaceSurrogate,
        3 => Algorithm::Dynamic,
        x => return Err(invalid(format!("unknown algorithm {x}"))),
    };
    let cost = match o.cost {
        0 => CostFunctionKind::Unit,
        1 => CostFunctionKind::Degree,
        2 => CostFunctionKind::SuccSum,
        3 => CostFunctionKind::PredSum,
        x => return Err(invalid(format!("unknown cost function {x}"))),
    };
    let backend = match o.backend {
        0 => Backend::det(o.seed),
        1 => Backend::Parallel,
        x => return Err(invalid(format!("unknown backend {x}"))),
    };
    if o.ranks == 0 {
        return Err(invalid("ranks must be positive".into()));
    }
    if o.static_only && algorithm != Algorithm::Dynamic {
        return Err(invalid("static_only applies to the dynamic algorithm only".into()));
    }
    Ok((algorithm, RunConfig::new(o.ranks as usize, cost, backend).static_only(o.static_only)))
}

/// Runs one counting algorithm and returns its report.
///
/// # Safety
/// `graph` and `options` must be valid pointers and `out` a valid place to
/// store a handle.
#[no_mangle]
pub unsafe extern "C" fn tc_run(
    graph: *const TcGraph,
    options: *const TcRunOptions,
    out: *mut *mut TcReport,
) -> TcStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null_err("graph"))?;
        let o = options.as_ref().ok_or_else(|| null_err("options"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let (algorithm, cfg) = decode(o)?;
        let m = count(&g.0, algorithm, &cfg).map_err(lib_err)?;
        hand_out(out, TcReport(m));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`tc_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_report_free(report: *mut TcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Total triangle count, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_report_total(report: *const TcReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.total)
}

/// Seconds, or simulated work units under the deterministic backend.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_report_wall_time(report: *const TcReport) -> f64 {
    report.as_ref().map_or(0.0, |r| r.0.wall_time)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_report_rank_count(report: *const TcReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.ranks.len())
}

/// Copies rank `rank`'s metrics into `out`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tc_report_rank(report: *const TcReport, rank: usize, out: *mut TcRankMetrics) -> TcStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null_err("report"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        let row = r
            .0
            .ranks
            .get(rank)
            .ok_or_else(|| invalid(format!("rank {rank} out of range")))?;
        *out = TcRankMetrics {
            rank: row.rank as u64,
            triangles: row.triangles,
            data_msgs_sent: row.runtime.data_msgs_sent,
            bytes_sent: row.runtime.bytes_sent,
            requests_sent: row.runtime.requests_sent(),
            tasks_executed: row.tasks_executed,
            partition_bytes: row.partition_bytes,
            busy_time: row.runtime.busy_time,
            idle_time: row.runtime.idle_time,
        };
        Ok(())
    })
}

/// Static name of a status code, e.g. `"ok"`.
#[no_mangle]
pub extern "C" fn tc_status_name(status: TcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        TcStatus::Ok => c"ok",
        TcStatus::NullPointer => c"null pointer",
        TcStatus::InvalidArgument => c"invalid argument",
        TcStatus::Parse => c"parse error",
        TcStatus::Io => c"i/o error",
        TcStatus::Runtime => c"runtime error",
        TcStatus::Panic => c"panic",
    };
    s.as_ptr()
}
