use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Condvar, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{unbounded, Receiver, RecvTimeoutError, Sender};

use super::{
    abort_rank, panic_message, Aborted, CollectiveKind, Envelope, Message, RankContext,
    RankMetrics, RunOutput, RuntimeError, Stamped, Transport,
};

/// How often blocked ranks check whether the run was aborted.
const ABORT_CHECK: Duration = Duration::from_millis(5);

#[derive(Default)]
struct Collective {
    kind: Option<CollectiveKind>,
    arrived: usize,
    sum: u64,
    generation: u64,
    result: u64,
}

pub(super) struct World {
    ranks: usize,
    senders: Vec<Sender<Stamped>>,
    coll: Mutex<Collective>,
    released: Condvar,
    abort: AtomicBool,
    error: Mutex<Option<RuntimeError>>,
}

impl World {
    fn fail(&self, err: RuntimeError) {
        let mut slot = self.error.lock().unwrap_or_else(|e| e.into_inner());
        if slot.is_none() {
            *slot = Some(err);
        }
        self.abort.store(true, Ordering::SeqCst);
        self.released.notify_all();
    }

    fn aborted(&self) -> bool {
        self.abort.load(Ordering::SeqCst)
    }

    fn lock_coll(&self) -> MutexGuard<'_, Collective> {
        self.coll.lock().unwrap_or_else(|e| e.into_inner())
    }
}

pub(super) struct Endpoint<'a> {
    world: &'a World,
    rank: usize,
    rx: Receiver<Stamped>,
    start: Instant,
    idle: Duration,
}

impl Endpoint<'_> {
    pub(super) fn send(&mut self, dst: usize, msg: Message) {
        // the receiver outlives every sender, so this cannot fail
        let _ = self.world.senders[dst].send(Stamped { src: self.rank, msg, at: 0 });
    }

    pub(super) fn try_receive(&mut self) -> Option<Envelope> {
        self.rx
            .try_recv()
            .ok()
            .map(|m| Envelope { src: m.src, msg: m.msg })
    }

    pub(super) fn receive(&mut self) -> Envelope {
        let waiting = Instant::now();
        loop {
            match self.rx.recv_timeout(ABORT_CHECK) {
                Ok(m) => {
                    self.idle += waiting.elapsed();
                    return Envelope { src: m.src, msg: m.msg };
                }
                Err(RecvTimeoutError::Timeout) if !self.world.aborted() => continue,
                Err(_) => abort_rank(),
            }
        }
    }

    pub(super) fn collective(&mut self, rank: usize, kind: CollectiveKind, value: u64) -> u64 {
        let waiting = Instant::now();
        let mut coll = self.world.lock_coll();
        if let Some(expected) = coll.kind {
            if expected != kind {
                drop(coll);
                self.world.fail(RuntimeError::CollectiveMismatch {
                    rank,
                    expected: expected.name(),
                    got: kind.name(),
                });
                abort_rank();
            }
        }
        coll.kind = Some(kind);
        coll.arrived += 1;
        coll.sum += value;
        if coll.arrived == self.world.ranks {
            coll.result = coll.sum;
            coll.generation += 1;
            coll.kind = None;
            coll.arrived = 0;
            coll.sum = 0;
            self.world.released.notify_all();
        } else {
            let generation = coll.generation;
            while coll.generation == generation {
                if self.world.aborted() {
                    drop(coll);
                    abort_rank();
                }
                coll = self
                    .world
                    .released
                    .wait_timeout(coll, ABORT_CHECK)
                    .unwrap_or_else(|e| e.into_inner())
                    .0;
            }
        }
        let result = coll.result;
        drop(coll);
        self.idle += waiting.elapsed();
        result
    }

    pub(super) fn times(&self) -> (f64, f64) {
        let total = self.start.elapsed();
        let idle = self.idle.min(total);
        ((total - idle).as_secs_f64(), idle.as_secs_f64())
    }
}

pub(super) fn run<R, F>(ranks: usize, program: &F) -> Result<RunOutput<R>, RuntimeError>
where
    R: Send,
    F: Fn(&mut RankContext<'_>) -> R + Sync,
{
    let (senders, receivers): (Vec<_>, Vec<_>) = (0..ranks).map(|_| unbounded()).unzip();
    let world = World {
        ranks,
        senders,
        coll: Mutex::new(Collective::default()),
        released: Condvar::new(),
        abort: AtomicBool::new(false),
        error: Mutex::new(None),
    };
    let world_ref = &world;
    let started = Instant::now();
    let outcomes: Vec<Option<(R, RankMetrics, Receiver<Stamped>)>> = thread::scope(|s| {
        let handles: Vec<_> = receivers
            .into_iter()
            .enumerate()
            .map(|(rank, rx)| {
                s.spawn(move || {
                    let outcome = catch_unwind(AssertUnwindSafe(|| {
                        let mut ctx = RankContext {
                            rank,
                            ranks,
                            metrics: RankMetrics::new(rank, ranks),
                            transport: Transport::Par(Endpoint {
                                world: world_ref,
                                rank,
                                rx,
                                start: Instant::now(),
                                idle: Duration::ZERO,
                            }),
                        };
                        let result = program(&mut ctx);
                        let Transport::Par(ep) = &mut ctx.transport else { unreachable!() };
                        let rx = ep.rx.clone();
                        (result, ctx.finish(), rx)
                    }));
                    match outcome {
                        Ok(done) => Some(done),
                        Err(payload) => {
                            if !payload.is::<Aborted>() {
                                world_ref.fail(RuntimeError::RankPanicked {
                                    rank,
                                    message: panic_message(payload.as_ref()),
                                });
                            }
                            None
                        }
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().ok().flatten()).collect()
    });
    let wall_time = started.elapsed().as_secs_f64();

    if let Some(err) = world.error.into_inner().unwrap_or_else(|e| e.into_inner()) {
        return Err(err);
    }
    let mut results = Vec::with_capacity(ranks);
    let mut metrics = Vec::with_capacity(ranks);
    for (rank, outcome) in outcomes.into_iter().enumerate() {
        let (result, m, rx) = outcome.expect("rank finished without result");
        if let Ok(first) = rx.try_recv() {
            return Err(RuntimeError::Undelivered {
                rank,
                count: rx.len() + 1,
                first: first.msg.tag(),
            });
        }
        results.push(result);
        metrics.push(m);
    }
    Ok(RunOutput {
        results,
        metrics,
        wall_time,
        trace: Vec::new(),
    })
}
