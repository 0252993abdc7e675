//! Simulation and structural algorithms checked against the exact oracles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use cpdilute::cpsim::{self, OrientedConfig};
use cpdilute::graphgen::{dilute_bonds, dilute_sites, gen_erdos_renyi, gen_lattice2d, gen_path, DilutedGraph};
use cpdilute::oracle::{crossing_counts, exact_crossing_prob, exact_mean_extinction, oriented_next_row_dist, CROSSING_EDGE_LIMIT};
use cpdilute::percolate::{has_crossing, longest_path_dfs, longest_path_exact, Orientation, Rect};
use cpdilute::rng::sim_rng;
use cpdilute::stats;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleCheckOptions {
    /// Relative error injected into the simulated birth rate. Zero in real
    /// use; nonzero values must make the rate-sensitive checks fail.
    pub lambda_skew: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for OracleCheckOptions {
    fn default() -> Self {
        OracleCheckOptions {
            lambda_skew: 0.0,
            replicates: 100_000,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub statistic: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, statistic: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            statistic,
        });
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.statistic)?;
        }
        Ok(())
    }
}

/// Mean and standard error of simulated extinction times from all
/// occupied.
pub fn simulated_mean_extinction(dg: &DilutedGraph, lambda: f64, reps: usize, seed: u64) -> Result<(f64, f64)> {
    let times: Vec<f64> = cpsim::survival_times(dg, lambda, reps, f64::INFINITY, seed)?
        .into_iter()
        .map(|e| e.time)
        .collect();
    Ok((stats::mean(&times), stats::std_error(&times)))
}

/// Small random diluted graph for oracle comparisons: Erdős–Rényi with
/// 4 to 8 vertices, alternately bond and site diluted at 0.7.
pub fn random_small_graph(k: u64, seed: u64) -> Result<DilutedGraph> {
    let s = seed.wrapping_mul(1000).wrapping_add(k);
    let n = 4 + (k % 5) as usize;
    let g = Arc::new(gen_erdos_renyi(n, 2.5, s)?);
    Ok(if k % 2 == 0 { dilute_bonds(g, 0.7, s)? } else { dilute_sites(g, 0.7, s)? })
}

fn compare_extinction(
    report: &mut OracleReport,
    name: String,
    dg: &DilutedGraph,
    lambda: f64,
    opts: &OracleCheckOptions,
    seed: u64,
    rel_tol: Option<f64>,
) -> Result<()> {
    let exact = exact_mean_extinction(dg, lambda)?;
    let (mean, se) = simulated_mean_extinction(dg, lambda * (1.0 + opts.lambda_skew), opts.replicates, seed)?;
    let z = (mean - exact) / se;
    let rel = (mean - exact).abs() / exact;
    let passed = z.abs() <= 3.0 && rel_tol.is_none_or(|t| rel <= t);
    report.push(
        name,
        passed,
        format!("exact {exact:.6}, simulated {mean:.6} ± {se:.6} (z = {z:.2}, rel = {rel:.4})"),
    );
    Ok(())
}

/// Runs every check and collects the outcomes; errors are reserved for
/// invalid options or I/O, never for a failed comparison.
pub fn oracle_check(opts: &OracleCheckOptions) -> Result<OracleReport> {
    let mut r = OracleReport::default();
    let lam = 2.0;

    let single = DilutedGraph::undiluted(Arc::new(gen_path(1)?));
    compare_extinction(&mut r, "single_vertex".into(), &single, lam, opts, opts.seed, None)?;
    let isolated = dilute_bonds(Arc::new(gen_path(2)?), 0.0, 0)?;
    let exact = exact_mean_extinction(&isolated, lam)?;
    r.push(
        "two_isolated_vertices_exact",
        (exact - 1.5).abs() < 1e-9,
        format!("exact {exact:.12}, expected 1.5"),
    );

    let k2 = DilutedGraph::undiluted(Arc::new(gen_path(2)?));
    let exact = exact_mean_extinction(&k2, lam)?;
    r.push("k2_exact", (exact - 2.5).abs() < 1e-9, format!("exact {exact:.12}, expected 2.5"));
    compare_extinction(&mut r, "k2_simulation".into(), &k2, lam, opts, opts.seed, Some(0.02))?;

    for k in 0..10u64 {
        let dg = random_small_graph(k, opts.seed)?;
        let name = format!("random_graph_{k}(n={}, {})", dg.n(), dg.mode());
        compare_extinction(&mut r, name, &dg, 1.5, opts, opts.seed.wrapping_add(1 + k) << 20, None)?;
    }

    let mut monotone = true;
    let mut prev_row: Vec<f64> = Vec::new();
    for n in 1..=8 {
        let g = Arc::new(gen_path(n)?);
        let row = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&l| exact_mean_extinction(&DilutedGraph::undiluted(g.clone()), l))
            .collect::<std::result::Result<Vec<f64>, _>>()?;
        monotone &= row.windows(2).all(|w| w[0] <= w[1]);
        monotone &= prev_row.iter().zip(&row).all(|(a, b)| a <= b);
        prev_row = row;
    }
    r.push("path_extinction_monotone", monotone, "n <= 8, lambda in {0.5, 1, 2, 4}".into());

    crossing_checks(&mut r, opts)?;
    oriented_check(&mut r, opts)?;
    longest_path_check(&mut r, opts)?;
    Ok(r)
}

fn crossing_checks(r: &mut OracleReport, opts: &OracleCheckOptions) -> Result<()> {
    let half = exact_crossing_prob(2, 1, 0.5)?;
    r.push("crossing_half_n1", half == 0.5, format!("exact {half}"));

    let (w, h) = (3, 2);
    let base = Arc::new(gen_lattice2d(w + 1)?);
    let rect = Rect::new(0, w, 0, h);
    for p in [0.3, 0.5, 0.7] {
        let exact = exact_crossing_prob(w, h, p)?;
        let hits = (0..opts.replicates as u64)
            .into_par_iter()
            .map(|i| {
                let dg = dilute_bonds(base.clone(), p, opts.seed.wrapping_add(i))?;
                Ok(has_crossing(&dg, rect, Orientation::LeftRight)? as usize)
            })
            .sum::<Result<usize>>()?;
        let m = opts.replicates as f64;
        let est = hits as f64 / m;
        let se = (exact * (1.0 - exact) / m).sqrt();
        let z = (est - exact) / se;
        r.push(
            format!("crossing_mc_p{p}"),
            z.abs() <= 3.0,
            format!("{w}x{h} box: exact {exact:.6}, simulated {est:.6} (z = {z:.2})"),
        );
    }

    // counts by number of open edges, shared by every p and by the dual size
    let mut cache: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    let mut prob = |w: usize, h: usize, p: f64| -> Result<f64> {
        if !cache.contains_key(&(w, h)) {
            cache.insert((w, h), crossing_counts(w, h)?);
        }
        let counts = &cache[&(w, h)];
        let e = counts.len() - 1;
        Ok(counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * p.powi(k as i32) * (1.0 - p).powi((e - k) as i32))
            .sum())
    };
    let edges = |w: usize, h: usize| w * (h + 1) + h * w.saturating_sub(1);
    let mut worst = 0.0f64;
    let mut sizes = 0;
    for w in 2..=8 {
        for h in 0..=8 {
            if edges(w, h) > CROSSING_EDGE_LIMIT || edges(h + 1, w - 1) > CROSSING_EDGE_LIMIT {
                continue;
            }
            sizes += 1;
            for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let s = prob(w, h, p)? + prob(h + 1, w - 1, 1.0 - p)?;
                worst = worst.max((s - 1.0).abs());
            }
        }
    }
    r.push(
        "crossing_duality_identity",
        worst < 1e-12,
        format!("{sizes} box sizes, max |P + P_dual - 1| = {worst:.2e}"),
    );
    Ok(())
}

fn oriented_check(r: &mut OracleReport, opts: &OracleCheckOptions) -> Result<()> {
    let row = vec![false, true, false, true, false, true];
    let active = vec![true, false, true, true, true, true];
    let theta = 0.6;
    let dist = oriented_next_row_dist(&row, theta, &active)?;
    let keys: Vec<u32> = dist.keys().copied().collect();
    let probs: Vec<f64> = dist.values().copied().collect();
    let mut counts = vec![0u64; keys.len()];
    let mut rng = sim_rng(opts.seed);
    let start = OrientedConfig::new(row, theta, active)?;
    for _ in 0..opts.replicates {
        let mut c = start.clone();
        c.step(&mut rng);
        let mask = c.row.iter().enumerate().fold(0u32, |m, (x, &o)| m | (o as u32) << x);
        match keys.binary_search(&mask) {
            Ok(i) => counts[i] += 1,
            Err(_) => {
                r.push("oriented_next_row_chi2", false, format!("impossible row {mask:#b}"));
                return Ok(());
            }
        }
    }
    let test = stats::chi_square_gof(&counts, &probs, 5.0);
    r.push(
        "oriented_next_row_chi2",
        test.p_value > 0.01,
        format!("width 6, {} outcomes, p-value {:.4}", keys.len(), test.p_value),
    );
    Ok(())
}

fn longest_path_check(r: &mut OracleReport, opts: &OracleCheckOptions) -> Result<()> {
    let outcomes = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let s = opts.seed.wrapping_mul(7919).wrapping_add(k);
            let n = 6 + (k % 10) as usize;
            let dg = dilute_bonds(Arc::new(gen_erdos_renyi(n, 3.0, s)?), 0.8, s)?;
            let exact = longest_path_exact(&dg)?;
            let path = longest_path_dfs(&dg, 5, s);
            Ok((path.is_valid(&dg) && path.length() <= exact, path.length() == exact))
        })
        .collect::<Result<Vec<(bool, bool)>>>()?;
    let bounded = outcomes.iter().all(|o| o.0);
    let optimal = outcomes.iter().filter(|o| o.1).count();
    r.push(
        "longest_path_dfs_vs_exact",
        bounded,
        format!("100 graphs with 6..15 vertices: DFS valid and <= exact in all; optimal in {optimal}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(skew: f64) -> OracleReport {
        oracle_check(&OracleCheckOptions {
            lambda_skew: skew,
            replicates: 20_000,
            seed: 3,
        })
        .unwrap()
    }

    #[test]
    fn clean_run_passes() {
        let r = quick(0.0);
        assert!(r.all_passed(), "{r}");
        assert!(r.checks.len() >= 20);
    }

    #[test]
    fn skewed_rate_is_caught() {
        let r = quick(0.2);
        assert!(!r.get("k2_simulation").unwrap().passed, "{r}");
        assert!(r.get("single_vertex").unwrap().passed);
        assert!(r.get("k2_exact").unwrap().passed);
    }
}
