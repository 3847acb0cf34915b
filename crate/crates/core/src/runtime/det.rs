use std::cell::RefCell;
use std::collections::VecDeque;
use std::panic::{catch_unwind, AssertUnwindSafe};

use corosensei::{Coroutine, CoroutineResult, Yielder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    abort_rank, panic_message, Aborted, CollectiveKind, Envelope, Message, RankContext,
    RankMetrics, RunOutput, RuntimeError, Stamped, TraceEvent, Transport,
};

/// Longest turn, in runtime calls, a rank runs before yielding.
const MAX_TURN: u32 = 8;
/// Simulated delivery delay added to a message's send time.
const LATENCY: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ready,
    Receiving,
    InCollective,
    Done,
}

#[derive(Default)]
struct Collective {
    kind: Option<CollectiveKind>,
    arrived: usize,
    sum: u64,
    max_clock: u64,
    /// (sum, max clock) of the last completed collective
    result: (u64, u64),
}

struct State {
    ranks: usize,
    turn_left: u32,
    status: Vec<Status>,
    inbox: Vec<VecDeque<Stamped>>,
    coll: Collective,
    failed: Option<RuntimeError>,
    trace: Vec<TraceEvent>,
}

impl State {
    fn runnable(&self, r: usize) -> bool {
        match self.status[r] {
            Status::Ready => true,
            Status::Receiving => !self.inbox[r].is_empty(),
            Status::InCollective | Status::Done => false,
        }
    }

    /// Next runnable rank after `me` in cyclic order, `me` itself last.
    fn next_after(&self, me: usize) -> Option<usize> {
        (1..=self.ranks)
            .map(|off| (me + off) % self.ranks)
            .find(|&r| self.runnable(r))
    }

    fn blocked(&self) -> Vec<usize> {
        (0..self.ranks)
            .filter(|&r| self.status[r] != Status::Done)
            .collect()
    }
}

pub(super) struct Endpoint<'a> {
    state: &'a RefCell<State>,
    yielder: &'a Yielder<(), ()>,
    rank: usize,
    clock: u64,
    busy: u64,
    idle: u64,
}

impl Endpoint<'_> {
    /// Hands control back to the scheduler with this rank left in `status`.
    fn suspend(&self, status: Status) {
        self.state.borrow_mut().status[self.rank] = status;
        self.yielder.suspend(());
    }

    /// Counts one runtime call against the current turn.
    fn tick(&self) {
        let end_turn = {
            let mut st = self.state.borrow_mut();
            st.turn_left = st.turn_left.saturating_sub(1);
            st.turn_left == 0
        };
        if end_turn {
            self.suspend(Status::Ready);
        }
    }

    pub(super) fn send(&mut self, dst: usize, msg: Message) {
        {
            let mut st = self.state.borrow_mut();
            let seq = st.trace.len() as u64;
            st.trace.push(TraceEvent {
                seq,
                src: self.rank,
                dst,
                tag: msg.tag(),
                bytes: msg.wire_bytes(),
            });
            st.inbox[dst].push_back(Stamped {
                src: self.rank,
                msg,
                at: self.clock + LATENCY,
            });
        }
        self.tick();
    }

    pub(super) fn try_receive(&mut self) -> Option<Envelope> {
        let got = self.state.borrow_mut().inbox[self.rank].pop_front();
        self.tick();
        got.map(|m| self.arrive(m))
    }

    pub(super) fn receive(&mut self) -> Envelope {
        loop {
            let got = self.state.borrow_mut().inbox[self.rank].pop_front();
            if let Some(m) = got {
                return self.arrive(m);
            }
            self.suspend(Status::Receiving);
        }
    }

    pub(super) fn collective(&mut self, rank: usize, kind: CollectiveKind, value: u64) -> u64 {
        let complete = {
            let mut st = self.state.borrow_mut();
            if let Some(expected) = st.coll.kind {
                if expected != kind {
                    st.failed.get_or_insert(RuntimeError::CollectiveMismatch {
                        rank,
                        expected: expected.name(),
                        got: kind.name(),
                    });
                    drop(st);
                    abort_rank();
                }
            }
            let ranks = st.ranks;
            let coll = &mut st.coll;
            coll.kind = Some(kind);
            coll.arrived += 1;
            coll.sum += value;
            coll.max_clock = coll.max_clock.max(self.clock);
            if coll.arrived == ranks {
                let result = (coll.sum, coll.max_clock);
                st.coll = Collective { result, ..Default::default() };
                for s in st.status.iter_mut() {
                    if *s == Status::InCollective {
                        *s = Status::Ready;
                    }
                }
                true
            } else {
                false
            }
        };
        if !complete {
            self.suspend(Status::InCollective);
        }
        let (sum, release) = self.state.borrow().coll.result;
        self.jump_to(release);
        sum
    }

    pub(super) fn add_work(&mut self, units: u64) {
        self.clock += units;
        self.busy += units;
    }

    pub(super) fn times(&self) -> (f64, f64) {
        (self.busy as f64, self.idle as f64)
    }

    fn arrive(&mut self, m: Stamped) -> Envelope {
        self.jump_to(m.at);
        Envelope { src: m.src, msg: m.msg }
    }

    fn jump_to(&mut self, t: u64) {
        if t > self.clock {
            self.idle += t - self.clock;
            self.clock = t;
        }
    }
}

type RankCoroutine<R> = Coroutine<(), (), (R, RankMetrics)>;

/// Runs every rank as a coroutine on the calling thread. The scheduler
/// resumes ranks in cyclic order; each turn lasts a seeded random number of
/// runtime calls, or until the rank blocks.
pub(super) fn run<R, F>(ranks: usize, seed: u64, program: &F) -> Result<RunOutput<R>, RuntimeError>
where
    F: Fn(&mut RankContext<'_>) -> R,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state = RefCell::new(State {
        ranks,
        turn_left: 0,
        status: vec![Status::Ready; ranks],
        inbox: vec![VecDeque::new(); ranks],
        coll: Collective::default(),
        failed: None,
        trace: Vec::new(),
    });
    let state_ref = &state;

    let mut coroutines: Vec<RankCoroutine<R>> = (0..ranks)
        .map(|rank| {
            let body = move |yielder: &Yielder<(), ()>, ()| {
                let mut ctx = RankContext {
                    rank,
                    ranks,
                    metrics: RankMetrics::new(rank, ranks),
                    transport: Transport::Det(Endpoint {
                        state: state_ref,
                        yielder,
                        rank,
                        clock: 0,
                        busy: 0,
                        idle: 0,
                    }),
                };
                let result = program(&mut ctx);
                (result, ctx.finish())
            };
            // SAFETY: the coroutine borrows `state` and `program`, both of
            // which outlive `coroutines`; every coroutine is finished or
            // dropped (unwinding its stack) before this function returns.
            unsafe { Coroutine::with_stack_unchecked(Default::default(), body) }
        })
        .collect();

    let mut outcomes: Vec<Option<(R, RankMetrics)>> = (0..ranks).map(|_| None).collect();
    let mut current = (seed % ranks as u64) as usize;
    loop {
        state.borrow_mut().turn_left = rng.gen_range(1..=MAX_TURN);
        let step = catch_unwind(AssertUnwindSafe(|| coroutines[current].resume(())));
        match step {
            Ok(CoroutineResult::Yield(())) => {}
            Ok(CoroutineResult::Return(done)) => {
                outcomes[current] = Some(done);
                state.borrow_mut().status[current] = Status::Done;
            }
            Err(payload) => {
                let mut st = state.borrow_mut();
                st.status[current] = Status::Done;
                if !payload.is::<Aborted>() {
                    st.failed.get_or_insert(RuntimeError::RankPanicked {
                        rank: current,
                        message: panic_message(payload.as_ref()),
                    });
                }
            }
        }
        let mut st = state.borrow_mut();
        if st.failed.is_some() || st.status.iter().all(|&s| s == Status::Done) {
            break;
        }
        match st.next_after(current) {
            Some(next) => current = next,
            None => {
                let blocked = st.blocked();
                st.failed = Some(RuntimeError::Deadlock { blocked });
                break;
            }
        }
    }
    // unwinds any rank still suspended
    drop(coroutines);

    let state = state.into_inner();
    if let Some(err) = state.failed {
        return Err(err);
    }
    if let Some((rank, q)) = state.inbox.iter().enumerate().find(|(_, q)| !q.is_empty()) {
        return Err(RuntimeError::Undelivered {
            rank,
            count: state.inbox.iter().map(VecDeque::len).sum(),
            first: q[0].msg.tag(),
        });
    }
    let (results, metrics): (Vec<R>, Vec<RankMetrics>) = outcomes
        .into_iter()
        .map(|o| o.expect("rank finished without result"))
        .unzip();
    let wall_time = metrics
        .iter()
        .map(|m| m.busy_time + m.idle_time)
        .fold(0.0, f64::max);
    Ok(RunOutput {
        results,
        metrics,
        wall_time,
        trace: state.trace,
    })
}
