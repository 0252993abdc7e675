use std::sync::Arc;

use cpdilute::cpsim::{self, run_oriented, HarrisConstruction, OrientedConfig};
use cpdilute::graphgen::{dilute_bonds, dilute_sites, gen_erdos_renyi, gen_path, DilutedGraph};
use cpdilute::oracle::{exact_mean_extinction, oriented_next_row_dist};
use cpdilute::rng::sim_rng;
use cpdilute::stats;

fn mean_and_se(dg: &DilutedGraph, lambda: f64, reps: usize, seed: u64) -> (f64, f64) {
    let t: Vec<f64> = cpsim::survival_times(dg, lambda, reps, f64::INFINITY, seed)
        .unwrap()
        .into_iter()
        .map(|e| e.time)
        .collect();
    (stats::mean(&t), stats::std_error(&t))
}

#[test]
fn event_engine_matches_ctmc_on_small_diluted_graphs() {
    for k in 0..4u64 {
        let g = Arc::new(gen_erdos_renyi(5 + k as usize, 2.5, 40 + k).unwrap());
        let dg = if k % 2 == 0 {
            dilute_bonds(g, 0.8, k).unwrap()
        } else {
            dilute_sites(g, 0.8, k).unwrap()
        };
        let exact = exact_mean_extinction(&dg, 1.7).unwrap();
        let (m, se) = mean_and_se(&dg, 1.7, 40_000, 1000 * k);
        assert!((m - exact).abs() < 3.5 * se, "graph {k}: exact {exact}, simulated {m} ± {se}");
    }
}

#[test]
fn harris_construction_matches_ctmc() {
    let dg = DilutedGraph::undiluted(Arc::new(gen_path(4).unwrap()));
    let exact = exact_mean_extinction(&dg, 1.5).unwrap();
    let times: Vec<f64> = (0..20_000u64)
        .map(|s| {
            let h = HarrisConstruction::sample(&dg, 1.5, 500.0, s).unwrap();
            let e = h.extinction_time(&[true; 4]).unwrap();
            assert!(!e.censored);
            e.time
        })
        .collect();
    let (m, se) = (stats::mean(&times), stats::std_error(&times));
    assert!((m - exact).abs() < 3.5 * se, "exact {exact}, harris {m} ± {se}");
}

#[test]
fn oriented_width_six_next_row_law() {
    let row = vec![false, true, false, false, false, true];
    let active = vec![true, true, true, false, true, true];
    let theta = 0.45;
    let dist = oriented_next_row_dist(&row, theta, &active).unwrap();
    let keys: Vec<u32> = dist.keys().copied().collect();
    let mut counts = vec![0u64; keys.len()];
    let start = OrientedConfig::new(row, theta, active).unwrap();
    let mut rng = sim_rng(5);
    for _ in 0..100_000 {
        let mut c = start.clone();
        c.step(&mut rng);
        let mask = c.row.iter().enumerate().fold(0u32, |m, (x, &o)| m | (o as u32) << x);
        counts[keys.binary_search(&mask).expect("outcome has positive probability")] += 1;
    }
    let probs: Vec<f64> = dist.values().copied().collect();
    let test = stats::chi_square_gof(&counts, &probs, 5.0);
    assert!(test.p_value > 0.01, "p-value {}", test.p_value);
}

#[test]
fn oriented_runs_die_out_at_small_theta_and_persist_at_large() {
    let dies = (0..20).filter(|&s| !run_oriented(64, 0.3, 1.0, 2000, s).unwrap().extinction.censored).count();
    assert_eq!(dies, 20);
    let lives = (0..20).filter(|&s| run_oriented(64, 0.95, 1.0, 500, s).unwrap().extinction.censored).count();
    assert_eq!(lives, 20);
}

#[test]
fn replicate_outputs_do_not_depend_on_thread_count() {
    let dg = dilute_sites(Arc::new(gen_path(60).unwrap()), 0.8, 3).unwrap();
    let serial: Vec<_> = (0..16u64).map(|i| cpsim::extinction_time(&dg, 2.0, 200.0, 9 + i).unwrap()).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let parallel = pool.install(|| cpsim::survival_times(&dg, 2.0, 16, 200.0, 9).unwrap());
    assert_eq!(serial, parallel);
}
