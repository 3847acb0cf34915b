//! Message-passing substrate: `P` ranks, typed messages over FIFO
//! point-to-point channels, broadcast, barrier, and sum-reduction.
//!
//! Two backends share one contract:
//!
//! * [`Backend::Deterministic`] runs every rank as a coroutine on the calling
//!   thread. Ranks take turns in round-robin order, switching at runtime
//!   calls, with a seed choosing the starting rank and the length of each
//!   turn. Time is simulated: ranks report work units and the runtime keeps a
//!   logical clock per rank, so metrics are reproducible.
//! * [`Backend::Parallel`] runs ranks as free OS threads over unbounded
//!   channels and measures wall-clock time.
//!
//! Sends never block. Each rank's inbox is a single queue, so messages from
//! one sender arrive in send order.

mod det;
mod par;

use std::any::Any;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dynamic::Task;
use crate::graph::NodeId;

/// Word size used for message byte accounting.
const MSG_WORD: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Message {
    /// A neighbor list `N_v`, tagged with the node it belongs to.
    Data { node: NodeId, list: Vec<NodeId> },
    Completion,
    /// Ask the owner of `node` for its neighbor list.
    NeighborRequest { node: NodeId },
    TaskRequest { worker: usize },
    TaskAssign(Task),
    Terminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageTag {
    Data,
    Completion,
    NeighborRequest,
    TaskRequest,
    TaskAssign,
    Terminate,
}

impl Message {
    pub fn tag(&self) -> MessageTag {
        match self {
            Message::Data { .. } => MessageTag::Data,
            Message::Completion => MessageTag::Completion,
            Message::NeighborRequest { .. } => MessageTag::NeighborRequest,
            Message::TaskRequest { .. } => MessageTag::TaskRequest,
            Message::TaskAssign(_) => MessageTag::TaskAssign,
            Message::Terminate => MessageTag::Terminate,
        }
    }

    /// Size on an imagined wire: one tag word plus payload words.
    pub fn wire_bytes(&self) -> u64 {
        let payload = match self {
            Message::Data { list, .. } => 1 + list.len() as u64,
            Message::Completion | Message::Terminate => 0,
            Message::NeighborRequest { .. } | Message::TaskRequest { .. } => 1,
            Message::TaskAssign(_) => 2,
        };
        MSG_WORD * (1 + payload)
    }
}

/// A received message and the rank that sent it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub src: usize,
    pub msg: Message,
}

#[derive(Debug, Clone)]
pub(crate) struct Stamped {
    src: usize,
    msg: Message,
    /// sender's logical clock at send time (deterministic backend only)
    at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Serialized execution; `seed` picks the starting rank and turn lengths.
    Deterministic { seed: u64 },
    Parallel,
}

impl Backend {
    pub fn det(seed: u64) -> Self {
        Backend::Deterministic { seed }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Deterministic { .. } => "det",
            Backend::Parallel => "par",
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Backend::Deterministic { .. })
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "det" => Ok(Backend::det(0)),
            "par" => Ok(Backend::Parallel),
            _ => Err(crate::Error::invalid(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("rank count must be at least 1")]
    NoRanks,
    #[error("rank {rank} panicked: {message}")]
    RankPanicked { rank: usize, message: String },
    #[error("deadlock: no rank can make progress (blocked ranks: {blocked:?})")]
    Deadlock { blocked: Vec<usize> },
    #[error("collective mismatch: rank {rank} called {got} while others are in {expected}")]
    CollectiveMismatch {
        rank: usize,
        expected: &'static str,
        got: &'static str,
    },
    #[error("{count} undelivered message(s) at exit, first to rank {rank}: {first:?}")]
    Undelivered {
        rank: usize,
        count: usize,
        first: MessageTag,
    },
}

/// Per-rank counters kept by the runtime.
///
/// `busy_time`, `idle_time` and the run's wall time are seconds under the
/// parallel backend and simulated work units under the deterministic one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankMetrics {
    pub rank: usize,
    pub data_msgs_sent: u64,
    pub bytes_sent: u64,
    pub completion_msgs: u64,
    pub neighbor_requests: u64,
    pub task_requests: u64,
    pub task_assigns: u64,
    pub terminates: u64,
    pub msgs_received: u64,
    pub idle_poll_cycles: u64,
    pub work_units: u64,
    pub busy_time: f64,
    pub idle_time: f64,
    /// Data messages sent to each destination rank.
    pub data_sent_to: Vec<u64>,
}

impl RankMetrics {
    fn new(rank: usize, ranks: usize) -> Self {
        RankMetrics {
            rank,
            data_sent_to: vec![0; ranks],
            ..Default::default()
        }
    }

    fn record_send(&mut self, dst: usize, msg: &Message) {
        self.bytes_sent += msg.wire_bytes();
        match msg.tag() {
            MessageTag::Data => {
                self.data_msgs_sent += 1;
                self.data_sent_to[dst] += 1;
            }
            MessageTag::Completion => self.completion_msgs += 1,
            MessageTag::NeighborRequest => self.neighbor_requests += 1,
            MessageTag::TaskRequest => self.task_requests += 1,
            MessageTag::TaskAssign => self.task_assigns += 1,
            MessageTag::Terminate => self.terminates += 1,
        }
    }

    pub fn requests_sent(&self) -> u64 {
        self.neighbor_requests + self.task_requests
    }

    pub fn idle_fraction(&self) -> f64 {
        let total = self.busy_time + self.idle_time;
        if total > 0.0 {
            self.idle_time / total
        } else {
            0.0
        }
    }
}

/// One send, as recorded by the deterministic backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub seq: u64,
    pub src: usize,
    pub dst: usize,
    pub tag: MessageTag,
    pub bytes: u64,
}

#[derive(Debug)]
pub struct RunOutput<R> {
    pub results: Vec<R>,
    pub metrics: Vec<RankMetrics>,
    pub wall_time: f64,
    /// Every send in global order; empty under the parallel backend.
    pub trace: Vec<TraceEvent>,
}

enum Transport<'a> {
    Det(det::Endpoint<'a>),
    Par(par::Endpoint<'a>),
}

/// A rank's handle on the runtime.
pub struct RankContext<'a> {
    rank: usize,
    ranks: usize,
    metrics: RankMetrics,
    transport: Transport<'a>,
}

/// Payload of the unwinding used to tear down ranks after another rank failed.
pub(crate) struct Aborted;

pub(crate) fn abort_rank() -> ! {
    std::panic::resume_unwind(Box::new(Aborted))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CollectiveKind {
    Barrier,
    ReduceSum,
}

impl CollectiveKind {
    fn name(self) -> &'static str {
        match self {
            CollectiveKind::Barrier => "barrier",
            CollectiveKind::ReduceSum => "reduce_sum",
        }
    }
}

impl<'a> RankContext<'a> {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ranks(&self) -> usize {
        self.ranks
    }

    pub fn metrics(&self) -> &RankMetrics {
        &self.metrics
    }

    /// Enqueues `msg` for `dst`. Never blocks.
    ///
    /// Panics if `dst` is out of range or is the calling rank.
    pub fn send(&mut self, dst: usize, msg: Message) {
        assert!(dst < self.ranks, "rank {} sent to invalid rank {dst}", self.rank);
        assert!(dst != self.rank, "rank {dst} sent a message to itself");
        self.metrics.record_send(dst, &msg);
        match &mut self.transport {
            Transport::Det(ep) => ep.send(dst, msg),
            Transport::Par(ep) => ep.send(dst, msg),
        }
    }

    /// `P − 1` point-to-point sends.
    pub fn broadcast(&mut self, msg: Message) {
        let me = self.rank;
        for dst in (0..self.ranks).filter(|&d| d != me) {
            self.send(dst, msg.clone());
        }
    }

    /// Returns one pending message, if any. Never blocks.
    pub fn try_receive(&mut self) -> Option<Envelope> {
        let got = match &mut self.transport {
            Transport::Det(ep) => ep.try_receive(),
            Transport::Par(ep) => ep.try_receive(),
        };
        match got {
            Some(env) => {
                self.metrics.msgs_received += 1;
                Some(env)
            }
            None => {
                self.metrics.idle_poll_cycles += 1;
                None
            }
        }
    }

    /// Waits for the next message.
    pub fn receive(&mut self) -> Envelope {
        let env = match &mut self.transport {
            Transport::Det(ep) => ep.receive(),
            Transport::Par(ep) => ep.receive(),
        };
        self.metrics.msgs_received += 1;
        env
    }

    pub fn barrier(&mut self) {
        self.collective(CollectiveKind::Barrier, 0);
    }

    /// Sum of every rank's `local`, returned at rank 0 only.
    pub fn reduce_sum(&mut self, local: u64) -> Option<u64> {
        let total = self.collective(CollectiveKind::ReduceSum, local);
        (self.rank == 0).then_some(total)
    }

    /// Reports computation done since the last call. Advances the simulated
    /// clock under the deterministic backend.
    pub fn add_work(&mut self, units: u64) {
        self.metrics.work_units += units;
        if let Transport::Det(ep) = &mut self.transport {
            ep.add_work(units);
        }
    }

    fn collective(&mut self, kind: CollectiveKind, value: u64) -> u64 {
        match &mut self.transport {
            Transport::Det(ep) => ep.collective(self.rank, kind, value),
            Transport::Par(ep) => ep.collective(self.rank, kind, value),
        }
    }

    fn finish(mut self) -> RankMetrics {
        match &mut self.transport {
            Transport::Det(ep) => {
                let (busy, idle) = ep.times();
                self.metrics.busy_time = busy;
                self.metrics.idle_time = idle;
            }
            Transport::Par(ep) => {
                let (busy, idle) = ep.times();
                self.metrics.busy_time = busy;
                self.metrics.idle_time = idle;
            }
        }
        self.metrics
    }
}

/// Runs `program` once per rank under `backend` and collects the results in
/// rank order. A panicking rank aborts the whole run; so does a deadlock
/// (deterministic backend) or a message left undelivered at exit.
pub fn run<R, F>(ranks: usize, backend: Backend, program: F) -> Result<RunOutput<R>, RuntimeError>
where
    R: Send,
    F: Fn(&mut RankContext<'_>) -> R + Sync,
{
    if ranks == 0 {
        return Err(RuntimeError::NoRanks);
    }
    match backend {
        Backend::Deterministic { seed } => det::run(ranks, seed, &program),
        Backend::Parallel => par::run(ranks, &program),
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}
