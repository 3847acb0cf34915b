//! Coordinator/worker counting with dynamic load balancing.
//!
//! Every rank sees the whole graph. Rank 0 coordinates and counts nothing.
//! Workers first run a deterministic initial task each (together covering the
//! cheapest half of the total cost), then ask the coordinator for more. The
//! coordinator hands out the rest of the node range from a queue whose tasks
//! shrink as the unassigned remainder shrinks: each queued task takes the
//! shortest run of remaining nodes whose cost reaches `remaining / workers`.

use std::collections::VecDeque;

use crate::engine::{Algorithm, RankOutcome, RunConfig, RunMetrics};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{balanced_ranges, node_costs, NodeRange};
use crate::runtime::{self, Message, RankContext};
use crate::seq::{intersect_count, TriangleCount};

/// Counting work for nodes `start..start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Task {
    pub start: usize,
    pub len: usize,
}

impl Task {
    pub fn new(start: usize, len: usize) -> Self {
        Task { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn is_atomic(&self) -> bool {
        self.len == 1
    }

    /// `S(v, t) = Σ_{i < t} f(v + i)`
    pub fn size(&self, costs: &[u64]) -> u64 {
        costs[self.start..self.end()].iter().sum()
    }

    pub fn range(&self) -> NodeRange {
        NodeRange::new(self.start, self.len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskPlan {
    /// First node not covered by the initial tasks.
    pub t_prime: usize,
    /// One range per worker, in worker order; may be empty for tiny inputs.
    pub initial: Vec<NodeRange>,
    /// Tasks the coordinator hands out, in dequeue order.
    pub queue: Vec<Task>,
}

impl TaskPlan {
    /// Every range the plan will execute, initial ranges first.
    pub fn all_ranges(&self) -> impl Iterator<Item = NodeRange> + '_ {
        self.initial
            .iter()
            .copied()
            .chain(self.queue.iter().map(Task::range))
    }
}

/// Builds the initial assignment and the coordinator's queue for `ranks`
/// ranks (one coordinator, `ranks − 1` workers).
pub fn plan_tasks(costs: &[u64], ranks: usize) -> Result<TaskPlan> {
    if ranks < 2 {
        return Err(Error::invalid(format!(
            "dynamic load balancing needs at least 2 ranks, got {ranks}"
        )));
    }
    let workers = (ranks - 1) as u128;
    let n = costs.len();
    let total: u128 = costs.iter().map(|&c| c as u128).sum();

    let mut t_prime = 0;
    let mut prefix = 0u128;
    while t_prime < n && 2 * prefix < total {
        prefix += costs[t_prime] as u128;
        t_prime += 1;
    }
    let initial = balanced_ranges(costs, NodeRange::new(0, t_prime), ranks - 1)?;

    let mut queue = Vec::new();
    let mut remaining = total - prefix;
    let mut start = t_prime;
    while start < n {
        // shortest run with cost ≥ remaining / workers, at least one node
        let mut end = start;
        let mut acc = 0u128;
        loop {
            acc += costs[end] as u128;
            end += 1;
            if end == n || acc * workers >= remaining {
                break;
            }
        }
        queue.push(Task::new(start, end - start));
        remaining -= acc;
        start = end;
    }
    Ok(TaskPlan { t_prime, initial, queue })
}

/// Static split: the initial tasks cover every node and the queue is empty.
pub fn plan_static(costs: &[u64], ranks: usize) -> Result<TaskPlan> {
    if ranks < 2 {
        return Err(Error::invalid(format!(
            "dynamic load balancing needs at least 2 ranks, got {ranks}"
        )));
    }
    let initial = balanced_ranges(costs, NodeRange::new(0, costs.len()), ranks - 1)?;
    Ok(TaskPlan { t_prime: costs.len(), initial, queue: Vec::new() })
}

/// Triangles whose lowest node lies in `range`, with the merge work done.
fn count_range_with_work(g: &Graph, range: NodeRange) -> (TriangleCount, u64) {
    let mut total = 0;
    let mut work = 0u64;
    for v in range.ids() {
        let nv = g.effective(v);
        for &u in nv {
            let nu = g.effective(u);
            total += intersect_count(nv, nu);
            work += (nv.len() + nu.len()) as u64;
        }
    }
    (total, work)
}

pub fn count_task(g: &Graph, task: Task) -> TriangleCount {
    count_range_with_work(g, task.range()).0
}

/// Coordinator/worker counting. With `cfg.static_only` the initial tasks cover
/// the whole graph and no task is handed out dynamically.
pub fn count_dynamic(g: &Graph, cfg: &RunConfig) -> Result<RunMetrics> {
    let costs = node_costs(g, cfg.cost);
    let plan = if cfg.static_only {
        plan_static(&costs, cfg.ranks)?
    } else {
        plan_tasks(&costs, cfg.ranks)?
    };
    let out = runtime::run(cfg.ranks, cfg.backend, |ctx| {
        if ctx.rank() == 0 {
            coordinator(ctx, &plan)
        } else {
            worker(ctx, g, &plan)
        }
    })?;
    let graph_bytes = crate::partition::graph_bytes_effective(g);
    RunMetrics::assemble(Algorithm::Dynamic, cfg, out, |_| graph_bytes)
}

fn coordinator(ctx: &mut RankContext<'_>, plan: &TaskPlan) -> RankOutcome {
    let mut queue: VecDeque<Task> = plan.queue.iter().copied().collect();
    let mut terminated = 0;
    while terminated < ctx.ranks() - 1 {
        let env = ctx.receive();
        let Message::TaskRequest { worker } = env.msg else {
            panic!("coordinator got unexpected {:?} from rank {}", env.msg.tag(), env.src);
        };
        match queue.pop_front() {
            Some(task) => ctx.send(worker, Message::TaskAssign(task)),
            None => {
                ctx.send(worker, Message::Terminate);
                terminated += 1;
            }
        }
    }
    ctx.barrier();
    RankOutcome {
        total: ctx.reduce_sum(0),
        ..Default::default()
    }
}

fn worker(ctx: &mut RankContext<'_>, g: &Graph, plan: &TaskPlan) -> RankOutcome {
    let me = ctx.rank();
    let mut out = RankOutcome::default();
    let mut execute = |ctx: &mut RankContext<'_>, range: NodeRange| {
        let (t, work) = count_range_with_work(g, range);
        ctx.add_work(work);
        out.triangles += t;
        out.tasks_executed += 1;
        out.executed.push(range);
    };
    let initial = plan.initial[me - 1];
    if !initial.is_empty() {
        execute(ctx, initial);
    }
    loop {
        ctx.send(0, Message::TaskRequest { worker: me });
        let env = ctx.receive();
        match env.msg {
            Message::Terminate => break,
            Message::TaskAssign(task) => execute(ctx, task.range()),
            other => panic!("worker {me} got unexpected {:?}", other.tag()),
        }
    }
    ctx.barrier();
    out.total = ctx.reduce_sum(out.triangles);
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn sizes(plan: &TaskPlan) -> Vec<usize> {
        plan.queue.iter().map(|t| t.len).collect()
    }

    #[test]
    fn unit_costs_hundred_nodes_five_ranks() {
        let plan = plan_tasks(&[1; 100], 5).unwrap();
        assert_eq!(plan.t_prime, 50);
        let mut initial: Vec<usize> = plan.initial.iter().map(|r| r.len).collect();
        initial.sort_unstable();
        assert_eq!(initial, vec![12, 12, 13, 13]);
        assert_eq!(sizes(&plan), vec![13, 10, 7, 5, 4, 3, 2, 2, 1, 1, 1, 1]);
        assert_eq!(plan.queue[0].start, 50);
    }

    #[test]
    fn single_worker_takes_remainder_in_one_task() {
        let plan = plan_tasks(&[1; 4], 2).unwrap();
        assert_eq!(plan.t_prime, 2);
        assert_eq!(plan.initial, vec![NodeRange::new(0, 2)]);
        assert_eq!(plan.queue, vec![Task::new(2, 2)]);
    }

    #[test]
    fn rejects_single_rank() {
        assert!(plan_tasks(&[1, 2, 3], 1).is_err());
        assert!(plan_static(&[1, 2, 3], 1).is_err());
    }

    #[test]
    fn tiny_inputs_leave_some_workers_without_initial_task() {
        let plan = plan_tasks(&[1, 1], 5).unwrap();
        assert_eq!(plan.initial.len(), 4);
        assert!(plan.initial.iter().any(NodeRange::is_empty));
        let covered: usize = plan.all_ranges().map(|r| r.len).sum();
        assert_eq!(covered, 2);
    }

    #[test]
    fn empty_cost_array() {
        let plan = plan_tasks(&[], 3).unwrap();
        assert_eq!(plan.t_prime, 0);
        assert!(plan.queue.is_empty());
    }

    #[test]
    fn static_plan_covers_everything() {
        let plan = plan_static(&[3, 1, 4, 1, 5, 9, 2, 6], 4).unwrap();
        assert!(plan.queue.is_empty());
        assert_eq!(plan.initial.len(), 3);
        assert_eq!(plan.initial.last().unwrap().end(), 8);
    }

    /// Scalar reference loop for the queue, using floating-point targets.
    fn reference_queue(costs: &[u64], t_prime: usize, workers: usize) -> Vec<Task> {
        let mut out = Vec::new();
        let mut v = t_prime;
        while v < costs.len() {
            let remaining: u64 = costs[v..].iter().sum();
            let target = remaining as f64 / workers as f64;
            let mut t = 0;
            let mut acc = 0u64;
            while v + t < costs.len() && (t == 0 || (acc as f64) < target) {
                acc += costs[v + t];
                t += 1;
            }
            out.push(Task::new(v, t));
            v += t;
        }
        out
    }

    proptest! {
        #[test]
        fn plan_tiles_and_shrinks(
            costs in proptest::collection::vec(0u64..1000, 1..400),
            ranks in 2usize..20,
        ) {
            let plan = plan_tasks(&costs, ranks).unwrap();
            let mut next = 0;
            for r in plan.all_ranges() {
                prop_assert_eq!(r.start, next);
                next = r.end();
            }
            prop_assert_eq!(next, costs.len());
            prop_assert!(plan.queue.iter().all(|t| t.len >= 1));
            prop_assert_eq!(&plan.queue, &reference_queue(&costs, plan.t_prime, ranks - 1));

            let max = *costs.iter().max().unwrap();
            for w in plan.queue.windows(2) {
                prop_assert!(w[1].size(&costs) <= w[0].size(&costs) + max);
            }
        }

        #[test]
        fn unit_cost_queue_is_non_increasing(n in 1usize..5000, ranks in 2usize..64) {
            let plan = plan_tasks(&vec![1; n], ranks).unwrap();
            for w in plan.queue.windows(2) {
                prop_assert!(w[1].len <= w[0].len);
            }
        }
    }
}
