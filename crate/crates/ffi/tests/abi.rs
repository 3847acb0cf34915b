use std::ffi::{CStr, CString};
use std::ptr;

use tricount_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tc_last_error_message()) }.to_string_lossy().into_owned()
}

fn k4() -> *mut TcGraph {
    let pairs: [u64; 12] = [0, 1, 0, 2, 0, 3, 1, 2, 1, 3, 2, 3];
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tc_graph_from_edges(pairs.as_ptr(), 6, &mut g) }, TcStatus::Ok);
    g
}

#[test]
fn k4_counts_four_triangles() {
    let g = k4();
    unsafe {
        assert_eq!(tc_graph_node_count(g), 4);
        assert_eq!(tc_graph_edge_count(g), 6);
        let mut t = 0;
        assert_eq!(tc_count_triangles(g, &mut t), TcStatus::Ok);
        assert_eq!(t, 4);
        tc_graph_free(g);
    }
}

#[test]
fn messy_edges_are_normalized() {
    let pairs: [u64; 10] = [9, 5, 5, 9, 7, 7, 9, 7, 5, 7];
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tc_graph_from_edges(pairs.as_ptr(), 5, &mut g), TcStatus::Ok);
        assert_eq!(tc_graph_node_count(g), 3);
        assert_eq!(tc_graph_edge_count(g), 3);
        tc_graph_free(g);
        assert_eq!(tc_graph_from_edges(ptr::null(), 0, &mut g), TcStatus::Ok);
        assert_eq!(tc_graph_node_count(g), 0);
        tc_graph_free(g);
    }
}

#[test]
fn every_algorithm_matches_seq() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tc_graph_generate_pa(3000, 12, 4, &mut g), TcStatus::Ok);
        let mut expected = 0;
        assert_eq!(tc_count_triangles(g, &mut expected), TcStatus::Ok);
        assert!(expected > 0);
        for algorithm in [TcAlgorithm::Seq, TcAlgorithm::SpaceDirect, TcAlgorithm::SpaceSurrogate, TcAlgorithm::Dynamic] {
            for backend in [TcBackend::Deterministic, TcBackend::Parallel] {
                let opts = TcRunOptions {
                    algorithm: algorithm as u32,
                    ranks: if algorithm == TcAlgorithm::Seq { 1 } else { 4 },
                    cost: TcCost::Degree as u32,
                    backend: backend as u32,
                    ..tc_run_options_default()
                };
                let mut r = ptr::null_mut();
                assert_eq!(tc_run(g, &opts, &mut r), TcStatus::Ok, "{}", last_error());
                assert_eq!(tc_report_total(r), expected);
                let n = tc_report_rank_count(r);
                let mut sum = 0;
                for rank in 0..n {
                    let mut m = TcRankMetrics::default();
                    assert_eq!(tc_report_rank(r, rank, &mut m), TcStatus::Ok);
                    assert_eq!(m.rank, rank as u64);
                    sum += m.triangles;
                }
                assert_eq!(sum, expected);
                let mut m = TcRankMetrics::default();
                assert_eq!(tc_report_rank(r, n, &mut m), TcStatus::InvalidArgument);
                tc_report_free(r);
            }
        }
        tc_graph_free(g);
    }
}

#[test]
fn deterministic_reports_repeat() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(tc_graph_generate_pa(2000, 10, 1, &mut g), TcStatus::Ok);
        let opts = TcRunOptions {
            algorithm: TcAlgorithm::SpaceSurrogate as u32,
            ranks: 5,
            seed: 17,
            ..tc_run_options_default()
        };
        let run = || {
            let mut r = ptr::null_mut();
            assert_eq!(tc_run(g, &opts, &mut r), TcStatus::Ok);
            let rows: Vec<_> = (0..tc_report_rank_count(r))
                .map(|i| {
                    let mut m = TcRankMetrics::default();
                    tc_report_rank(r, i, &mut m);
                    format!("{m:?}")
                })
                .collect();
            let wall = tc_report_wall_time(r);
            tc_report_free(r);
            (rows, wall)
        };
        assert_eq!(run(), run());
        tc_graph_free(g);
    }
}

#[test]
fn invalid_options_are_rejected() {
    let g = k4();
    let base = tc_run_options_default();
    let cases = [
        TcRunOptions { algorithm: 9, ..base },
        TcRunOptions { cost: 4, ..base },
        TcRunOptions { backend: 2, ..base },
        TcRunOptions { ranks: 0, ..base },
        TcRunOptions { static_only: true, ..base },
        TcRunOptions { algorithm: TcAlgorithm::Dynamic as u32, ranks: 1, ..base },
    ];
    for opts in cases {
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { tc_run(g, &opts, &mut r) }, TcStatus::InvalidArgument, "{opts:?}");
        assert!(r.is_null());
        assert!(!last_error().is_empty());
    }
    unsafe { tc_graph_free(g) };
}

#[test]
fn null_pointers_are_reported() {
    let mut g = ptr::null_mut();
    let mut t = 0;
    let mut r = ptr::null_mut();
    let opts = tc_run_options_default();
    unsafe {
        assert_eq!(tc_graph_from_edges(ptr::null(), 3, &mut g), TcStatus::NullPointer);
        assert_eq!(tc_graph_load_file(ptr::null(), &mut g), TcStatus::NullPointer);
        assert_eq!(tc_graph_generate_pa(10, 2, 0, ptr::null_mut()), TcStatus::NullPointer);
        assert_eq!(tc_count_triangles(ptr::null(), &mut t), TcStatus::NullPointer);
        assert_eq!(tc_run(ptr::null(), &opts, &mut r), TcStatus::NullPointer);
        assert_eq!(tc_graph_node_count(ptr::null()), 0);
        assert_eq!(tc_report_total(ptr::null()), 0);
        tc_graph_free(ptr::null_mut());
        tc_report_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn file_errors_map_to_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = ptr::null_mut();

    let missing = CString::new(dir.path().join("nope.txt").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tc_graph_load_file(missing.as_ptr(), &mut g) }, TcStatus::Io);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 x\n").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { tc_graph_load_file(bad.as_ptr(), &mut g) }, TcStatus::Parse);
    assert!(last_error().contains("line 2"));

    let good = dir.path().join("tri.txt");
    std::fs::write(&good, "# triangle\n10 20\n20 30\n30 10\n").unwrap();
    let good = CString::new(good.to_str().unwrap()).unwrap();
    let mut t = 0;
    unsafe {
        assert_eq!(tc_graph_load_file(good.as_ptr(), &mut g), TcStatus::Ok);
        assert_eq!(tc_count_triangles(g, &mut t), TcStatus::Ok);
        tc_graph_free(g);
    }
    assert_eq!(t, 1);
}

#[test]
fn status_names_are_distinct() {
    let all = [
        TcStatus::Ok,
        TcStatus::NullPointer,
        TcStatus::InvalidArgument,
        TcStatus::Parse,
        TcStatus::Io,
        TcStatus::Runtime,
        TcStatus::Panic,
    ];
    let names: std::collections::HashSet<_> =
        all.iter().map(|&s| unsafe { CStr::from_ptr(tc_status_name(s)) }.to_str().unwrap()).collect();
    assert_eq!(names.len(), all.len());
}
