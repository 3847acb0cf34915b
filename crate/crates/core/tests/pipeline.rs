use tricount::bench::{run_benchmark, BenchConfig, Suite};
use tricount::dynamic::{plan_tasks, Task};
use tricount::io::{export_edge_list, generate_pa, load_edge_list, PaParams};
use tricount::partition::{node_costs, partition_graph};
use tricount::{
    build_graph, count, count_triangles_seq, Algorithm, Backend, CostFunctionKind, Graph, RunConfig,
};

fn pa(n: usize, d: usize, seed: u64) -> Graph {
    build_graph(&generate_pa(&PaParams::new(n, d, seed)).unwrap())
}

#[test]
fn messy_input_counts_like_clean_input() {
    let messy = "# web crawl sample\n\n10 20\t20 30\n30 10\n10 10\n20 10\n40 50 50 10 40 10\n";
    let clean = "0 1\n1 2\n2 0\n3 4\n4 0\n3 0\n";
    let a = build_graph(&load_edge_list(messy.as_bytes()).unwrap());
    let b = build_graph(&load_edge_list(clean.as_bytes()).unwrap());
    assert_eq!(a.edge_count(), 6);
    assert_eq!(count_triangles_seq(&a), 2);
    assert_eq!(count_triangles_seq(&b), 2);
}

#[test]
fn exported_canonical_graph_reloads_to_same_count() {
    let g = pa(3000, 10, 2);
    let mut buf = Vec::new();
    export_edge_list(&g, &mut buf).unwrap();
    let h = build_graph(&load_edge_list(&buf[..]).unwrap());
    assert_eq!(h.edge_count(), g.edge_count());
    assert_eq!(count_triangles_seq(&h), count_triangles_seq(&g));
}

#[test]
fn backends_agree_on_every_algorithm() {
    let g = pa(5000, 16, 9);
    let expected = count_triangles_seq(&g);
    for algo in [Algorithm::SpaceDirect, Algorithm::SpaceSurrogate, Algorithm::Dynamic] {
        for backend in [Backend::det(3), Backend::Parallel] {
            let cfg = RunConfig::new(6, CostFunctionKind::Degree, backend);
            let m = count(&g, algo, &cfg).unwrap();
            assert_eq!(m.total, expected, "{algo} {backend}");
            assert_eq!(m.ranks.iter().map(|r| r.triangles).sum::<u64>(), expected);
        }
    }
}

#[test]
fn dynamic_totals_identical_across_rank_counts() {
    let g = pa(200_000, 20, 1);
    let totals: Vec<u64> = [2, 3, 5, 9]
        .into_iter()
        .map(|p| {
            let cfg = RunConfig::new(p, CostFunctionKind::Degree, Backend::det(0));
            count(&g, Algorithm::Dynamic, &cfg).unwrap().total
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[0] == w[1]), "{totals:?}");
    assert_eq!(totals[0], count_triangles_seq(&g));
}

#[test]
fn dynamic_workers_execute_exactly_the_plan() {
    let g = pa(4000, 10, 6);
    let ranks = 5;
    let cfg = RunConfig::new(ranks, CostFunctionKind::Unit, Backend::det(11));
    let m = count(&g, Algorithm::Dynamic, &cfg).unwrap();
    let plan = plan_tasks(&node_costs(&g, CostFunctionKind::Unit), ranks).unwrap();

    assert_eq!(m.ranks[0].tasks_executed, 0);
    assert_eq!(m.ranks[0].triangles, 0);
    let mut executed: Vec<_> = m.ranks.iter().flat_map(|r| r.executed.iter().copied()).collect();
    executed.sort_by_key(|r| r.start);
    let mut planned: Vec<_> = plan.all_ranges().filter(|r| !r.is_empty()).collect();
    planned.sort_by_key(|r| r.start);
    assert_eq!(executed, planned);

    let assigned: u64 = m.ranks[0].runtime.task_assigns;
    assert_eq!(assigned, plan.queue.len() as u64);
    assert_eq!(m.ranks[0].runtime.terminates, (ranks - 1) as u64);
    for (w, r) in m.ranks.iter().enumerate().skip(1) {
        let initial = plan.initial[w - 1];
        if !initial.is_empty() {
            assert_eq!(r.executed[0], initial);
        }
    }
    assert!(plan.queue.iter().all(|t: &Task| t.len >= 1));
}

#[test]
fn partitions_and_algorithms_share_ranges() {
    let g = pa(2000, 8, 4);
    let parts = partition_graph(&g, CostFunctionKind::PredSum, 4).unwrap();
    let cfg = RunConfig::new(4, CostFunctionKind::PredSum, Backend::det(0));
    let m = count(&g, Algorithm::SpaceSurrogate, &cfg).unwrap();
    for (p, r) in parts.iter().zip(&m.ranks) {
        assert_eq!(r.executed, vec![p.core]);
        assert_eq!(r.partition_bytes, tricount::partition::partition_bytes_nonoverlapping(p));
    }
}

#[test]
fn idle_suite_static_and_dynamic() {
    let base = BenchConfig {
        suite: Suite::Idle,
        n: 20_000,
        d: 20,
        ranks_list: vec![5],
        ..Default::default()
    };
    let max_idle = |static_only: bool| -> f64 {
        let mut buf = Vec::new();
        run_benchmark(&BenchConfig { static_only, ..base.clone() }, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|c| c[10] != "0")
            .map(|c| c[17].parse::<f64>().unwrap())
            .fold(0.0, f64::max)
    };
    assert!(max_idle(false) < max_idle(true));
}
