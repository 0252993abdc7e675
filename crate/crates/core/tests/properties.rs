use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Geometric};

use cpdilute::graphgen::{dilute_bonds, dilute_sites, gen_erdos_renyi, gen_lattice2d, gen_path, DilutedGraph, Mask};
use cpdilute::oracle::exact_mean_extinction;
use cpdilute::percolate::{
    components, crossing_path, dual_config, has_crossing, longest_path_dfs, longest_path_exact, max_active_run,
    stitch_paths, Orientation, Rect,
};
use cpdilute::stats;

fn kept(dg: &DilutedGraph) -> Vec<bool> {
    match dg.mask() {
        Mask::Bond(m) | Mask::Site(m) => m.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilution_is_deterministic_and_nested(seed in any::<u64>(), p1 in 0.0..1.0f64, p2 in 0.0..1.0f64, site in any::<bool>()) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let g = Arc::new(gen_erdos_renyi(200, 3.0, seed).unwrap());
        let dilute = |p| if site { dilute_sites(g.clone(), p, seed) } else { dilute_bonds(g.clone(), p, seed) }.unwrap();
        let a = dilute(lo);
        prop_assert_eq!(a.fingerprint(), dilute(lo).fingerprint());
        let b = dilute(hi);
        prop_assert!(kept(&a).iter().zip(kept(&b)).all(|(x, y)| !*x || y));
    }

    #[test]
    fn double_dual_is_identity(seed in any::<u64>(), side in 2usize..12, p in 0.0..1.0f64) {
        let d = dilute_bonds(Arc::new(gen_lattice2d(side).unwrap()), p, seed).unwrap();
        let back = dual_config(&dual_config(&d).unwrap()).unwrap();
        prop_assert_eq!(back.mask(), d.mask());
        prop_assert_eq!(back.base().kind(), d.base().kind());
        prop_assert_eq!(back.fingerprint(), d.fingerprint());
    }

    #[test]
    fn primal_crossing_xor_dual_crossing(seed in any::<u64>(), n in 1usize..10, p in 0.05..0.95f64) {
        let d = dilute_bonds(Arc::new(gen_lattice2d(n + 2).unwrap()), p, seed).unwrap();
        let dual = dual_config(&d).unwrap();
        let lr = has_crossing(&d, Rect::new(0, n + 1, 0, n), Orientation::LeftRight).unwrap();
        let tb = has_crossing(&dual, Rect::new(1, n + 1, 0, n + 1), Orientation::TopBottom).unwrap();
        prop_assert!(lr ^ tb);
    }

    #[test]
    fn structure_is_monotone_in_p(seed in any::<u64>(), p1 in 0.0..1.0f64, p2 in 0.0..1.0f64) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let er = Arc::new(gen_erdos_renyi(300, 2.0, seed).unwrap());
        let largest = |p| components(&dilute_bonds(er.clone(), p, seed).unwrap()).largest;
        prop_assert!(largest(lo) <= largest(hi));

        let path = Arc::new(gen_path(500).unwrap());
        let run = |p| max_active_run(&dilute_sites(path.clone(), p, seed).unwrap()).unwrap();
        prop_assert!(run(lo) <= run(hi));

        let lat = Arc::new(gen_lattice2d(12).unwrap());
        let rect = Rect::new(0, 11, 0, 11);
        let cross = |p| has_crossing(&dilute_bonds(lat.clone(), p, seed).unwrap(), rect, Orientation::LeftRight).unwrap();
        prop_assert!(!cross(lo) || cross(hi));

        let small = Arc::new(gen_erdos_renyi(14, 3.0, seed).unwrap());
        let longest = |p| longest_path_exact(&dilute_bonds(small.clone(), p, seed).unwrap()).unwrap();
        prop_assert!(longest(lo) <= longest(hi));
    }

    #[test]
    fn dfs_never_beats_exact(seed in any::<u64>(), n in 4usize..=15, mu in 0.5..4.0f64, p in 0.3..1.0f64) {
        let d = dilute_bonds(Arc::new(gen_erdos_renyi(n, mu, seed).unwrap()), p, seed).unwrap();
        let exact = longest_path_exact(&d).unwrap();
        let path = longest_path_dfs(&d, 4, seed);
        prop_assert!(path.is_valid(&d));
        prop_assert!(path.length() <= exact);
    }

    #[test]
    fn stitched_strip_crossings_are_self_avoiding(seed in any::<u64>(), p in 0.55..0.95f64) {
        let side = 16;
        let d = dilute_bonds(Arc::new(gen_lattice2d(side).unwrap()), p, seed).unwrap();
        let lr = crossing_path(&d, Rect::new(0, side - 1, 0, 7), Orientation::LeftRight).unwrap();
        let tb = crossing_path(&d, Rect::new(side - 4, side - 1, 0, side - 1), Orientation::TopBottom).unwrap();
        if let (Some(a), Some(b)) = (lr, tb) {
            // a vertical crossing of the end box meets every horizontal crossing of the strip
            let s = stitch_paths(&[a.clone(), b.reversed()]).unwrap();
            prop_assert!(s.is_valid(&d));
            prop_assert_eq!(s.vertices[0], a.vertices[0]);
            prop_assert_eq!(s.vertices.last(), b.vertices.first());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_extinction_monotone_in_edges(seed in any::<u64>(), n in 3usize..=7, lambda in 0.2..3.0f64, p1 in 0.0..1.0f64, p2 in 0.0..1.0f64) {
        // adding open edges can only lengthen survival (attractive coupling)
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let g = Arc::new(gen_erdos_renyi(n, 2.5, seed).unwrap());
        let a = exact_mean_extinction(&dilute_bonds(g.clone(), lo, seed).unwrap(), lambda).unwrap();
        let b = exact_mean_extinction(&dilute_bonds(g, hi, seed).unwrap(), lambda).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-9), "{} > {}", a, b);
    }
}

/// `P(longest run of successes <= k)` in `n` Bernoulli(`p`) trials, by
/// dynamic programming over the current run length.
fn longest_run_cdf(n: usize, p: f64, k: usize) -> f64 {
    let mut state = vec![0.0; k + 1];
    state[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; k + 1];
        let total: f64 = state.iter().sum();
        next[0] = total * (1.0 - p);
        for j in 0..k {
            next[j + 1] = state[j] * p;
        }
        state = next;
    }
    state.iter().sum()
}

/// Longest run assembled from i.i.d. geometric run lengths, each followed by
/// one inactive site, truncated at `n` sites.
fn longest_geometric_run(n: usize, p: f64, rng: &mut impl rand::Rng) -> usize {
    let geo = Geometric::new(1.0 - p).unwrap();
    let (mut pos, mut best) = (0usize, 0usize);
    while pos < n {
        let run = (geo.sample(rng) as usize).min(n - pos);
        best = best.max(run);
        pos += run + 1;
    }
    best
}

#[test]
fn max_active_run_matches_exact_and_geometric_laws() {
    let (n, p, seeds) = (200, 0.5, 4000u64);
    let path = Arc::new(gen_path(n).unwrap());
    let runs: Vec<usize> = (0..seeds)
        .map(|s| max_active_run(&dilute_sites(path.clone(), p, s).unwrap()).unwrap())
        .collect();
    let top = *runs.iter().max().unwrap();
    let mut counts = vec![0u64; top + 2];
    for &r in &runs {
        counts[r] += 1;
    }
    let cdf: Vec<f64> = (0..=top).map(|k| longest_run_cdf(n, p, k)).collect();
    let mut probs: Vec<f64> = (0..=top).map(|k| cdf[k] - if k == 0 { 0.0 } else { cdf[k - 1] }).collect();
    probs.push(1.0 - cdf[top]);
    let chi = stats::chi_square_gof(&counts, &probs, 5.0);
    assert!(chi.p_value > 0.001, "chi-square p-value {}", chi.p_value);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let geo: Vec<f64> = (0..seeds).map(|_| longest_geometric_run(n, p, &mut rng) as f64).collect();
    let masks: Vec<f64> = runs.iter().map(|&r| r as f64).collect();
    let diff = stats::mean(&masks) - stats::mean(&geo);
    let se = (stats::std_error(&masks).powi(2) + stats::std_error(&geo).powi(2)).sqrt();
    assert!(diff.abs() < 4.0 * se, "means differ by {diff} (se {se})");
    assert!(stats::ks_two_sample_accepts(&masks, &geo, 0.001));
}

#[test]
fn longest_run_cdf_small_cases() {
    // n = 2: runs 0, 1, 2 with probabilities q^2, 2pq, p^2
    let p = 0.3;
    assert!((longest_run_cdf(2, p, 0) - 0.49).abs() < 1e-12);
    assert!((longest_run_cdf(2, p, 1) - 0.91).abs() < 1e-12);
    assert!((longest_run_cdf(2, p, 2) - 1.0).abs() < 1e-12);
}
