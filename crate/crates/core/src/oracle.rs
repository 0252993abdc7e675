//! Exact baselines for small instances.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_prob, Error, Result};
use crate::graphgen::DilutedGraph;

pub const CTMC_VERTEX_LIMIT: usize = 12;
pub const CROSSING_EDGE_LIMIT: usize = 24;
pub const ORIENTED_WIDTH_LIMIT: usize = 16;
/// Largest vertex count solved by dense LU; larger chains use Gauss–Seidel.
const DENSE_LIMIT: usize = 10;
const GS_REL_TOL: f64 = 1e-10;
const GS_MAX_SWEEPS: usize = 2_000_000;

/// The contact process on at most 12 vertices as a Markov chain on
/// occupancy bitmasks. Transitions are generated on demand.
#[derive(Clone, Debug)]
pub struct CtmcSpec {
    n: usize,
    lambda: f64,
    /// For each vertex, bitmask of vertices it can give birth onto.
    targets: Vec<u32>,
}

impl CtmcSpec {
    pub fn new(dg: &DilutedGraph, lambda: f64) -> Result<Self> {
        let n = dg.n();
        if n > CTMC_VERTEX_LIMIT {
            return Err(Error::TooLarge {
                what: "vertices for the exact chain",
                actual: n,
                limit: CTMC_VERTEX_LIMIT,
            });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        let g = dg.base();
        let targets = (0..n as u32)
            .map(|x| {
                g.neighbors(x)
                    .iter()
                    .filter(|nb| dg.transmits(x, nb.edge))
                    .fold(0u32, |m, nb| m | 1 << nb.vertex)
            })
            .collect();
        Ok(CtmcSpec { n, lambda, targets })
    }

    pub fn n_states(&self) -> usize {
        1 << self.n
    }

    /// Calls `f(next, rate)` for each transition out of `state`; births onto
    /// the same vertex from different parents are merged.
    pub fn for_each_transition(&self, state: u32, mut f: impl FnMut(u32, f64)) {
        let mut births = [0u32; CTMC_VERTEX_LIMIT];
        for x in 0..self.n {
            if state >> x & 1 == 1 {
                f(state & !(1 << x), 1.0);
                let mut t = self.targets[x] & !state;
                while t != 0 {
                    births[t.trailing_zeros() as usize] += 1;
                    t &= t - 1;
                }
            }
        }
        if self.lambda > 0.0 {
            for (y, &k) in births.iter().enumerate().take(self.n) {
                if k > 0 {
                    f(state | 1 << y, self.lambda * k as f64);
                }
            }
        }
    }

    pub fn exit_rate(&self, state: u32) -> f64 {
        let mut r = 0.0;
        self.for_each_transition(state, |_, rate| r += rate);
        r
    }

    /// Mean hitting times of the empty state from every state.
    pub fn mean_absorption_times(&self) -> Result<Vec<f64>> {
        if self.n <= DENSE_LIMIT {
            self.solve_dense()
        } else {
            self.solve_gauss_seidel()
        }
    }

    fn solve_dense(&self) -> Result<Vec<f64>> {
        let m = self.n_states() - 1;
        if m == 0 {
            return Ok(vec![0.0]);
        }
        // unknown i is state i + 1
        let mut a = DMatrix::<f64>::zeros(m, m);
        for s in 1..=m as u32 {
            let i = s as usize - 1;
            self.for_each_transition(s, |next, rate| {
                a[(i, i)] += rate;
                if next != 0 {
                    a[(i, next as usize - 1)] -= rate;
                }
            });
        }
        let b = DVector::from_element(m, 1.0);
        let x = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Solver { sweeps: 0, residual: f64::NAN })?;
        Ok(std::iter::once(0.0).chain(x.iter().copied()).collect())
    }

    fn solve_gauss_seidel(&self) -> Result<Vec<f64>> {
        let full = self.n_states() as u32 - 1;
        let mut order: Vec<u32> = (1..=full).collect();
        order.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
        let mut m = vec![0.0; self.n_states()];
        let mut prev_delta = f64::INFINITY;
        for sweep in 1..=GS_MAX_SWEEPS {
            let mut delta: f64 = 0.0;
            for &s in &order {
                let (mut r, mut acc) = (0.0, 1.0);
                self.for_each_transition(s, |next, rate| {
                    r += rate;
                    acc += rate * m[next as usize];
                });
                let new = acc / r;
                delta = delta.max((new - m[s as usize]).abs());
                m[s as usize] = new;
            }
            // geometric tail bound on the remaining error
            let rho = (delta / prev_delta).min(1.0 - 1e-15);
            prev_delta = delta;
            let remaining = if sweep < 3 { f64::INFINITY } else { delta * rho / (1.0 - rho) };
            if remaining <= GS_REL_TOL * m[full as usize] {
                return Ok(m);
            }
        }
        Err(Error::Solver {
            sweeps: GS_MAX_SWEEPS,
            residual: prev_delta,
        })
    }
}

/// Mean extinction time from every vertex occupied.
pub fn exact_mean_extinction(dg: &DilutedGraph, lambda: f64) -> Result<f64> {
    let spec = CtmcSpec::new(dg, lambda)?;
    let m = spec.mean_absorption_times()?;
    Ok(m[spec.n_states() - 1])
}

/// Numbers of open-edge configurations with a left-right crossing, indexed
/// by the number of open edges, for the vertex box `[0,width] x [0,height]`.
/// Vertical edges on the two end columns cannot matter and are left out.
pub fn crossing_counts(width: usize, height: usize) -> Result<Vec<u64>> {
    if width == 0 {
        return Err(Error::InvalidSize("crossing box needs width >= 1".into()));
    }
    let cols = width + 1;
    let id = |x: usize, y: usize| x + cols * y;
    let mut edges = Vec::new();
    for y in 0..=height {
        for x in 0..width {
            edges.push((id(x, y), id(x + 1, y)));
        }
    }
    for y in 0..height {
        for x in 1..width {
            edges.push((id(x, y), id(x, y + 1)));
        }
    }
    if edges.len() > CROSSING_EDGE_LIMIT {
        return Err(Error::TooLarge {
            what: "edges in the crossing box",
            actual: edges.len(),
            limit: CROSSING_EDGE_LIMIT,
        });
    }
    let nv = cols * (height + 1);
    let left: u64 = (0..=height).fold(0, |m, y| m | 1 << id(0, y));
    let right: u64 = (0..=height).fold(0, |m, y| m | 1 << id(width, y));
    let e = edges.len();
    let mut counts = vec![0u64; e + 1];
    let mut adj = vec![0u64; nv];
    for config in 0u64..1 << e {
        adj.iter_mut().for_each(|a| *a = 0);
        for (k, &(u, v)) in edges.iter().enumerate() {
            if config >> k & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        let mut reached = left;
        let mut frontier = left;
        while frontier != 0 && reached & right == 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                next |= adj[f.trailing_zeros() as usize];
                f &= f - 1;
            }
            frontier = next & !reached;
            reached |= next;
        }
        if reached & right != 0 {
            counts[config.count_ones() as usize] += 1;
        }
    }
    Ok(counts)
}

/// Probability of a left-right open crossing of the vertex box
/// `[0,width] x [0,height]` with edges open independently with probability `p`.
pub fn exact_crossing_prob(width: usize, height: usize, p: f64) -> Result<f64> {
    check_prob("p", p)?;
    let counts = crossing_counts(width, height)?;
    let e = counts.len() - 1;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * p.powi(k as i32) * (1.0 - p).powi((e - k) as i32))
        .sum())
}

/// Exact law of the next oriented-model row: eligible columns (active, with
/// an occupied neighbor) are occupied independently with probability
/// `theta`. Rows are bitmasks with column `x` at bit `x`; outcomes of zero
/// probability are omitted.
pub fn oriented_next_row_dist(row: &[bool], theta: f64, active: &[bool]) -> Result<BTreeMap<u32, f64>> {
    check_prob("theta", theta)?;
    let w = row.len();
    if w > ORIENTED_WIDTH_LIMIT {
        return Err(Error::TooLarge {
            what: "row width",
            actual: w,
            limit: ORIENTED_WIDTH_LIMIT,
        });
    }
    if active.len() != w {
        return Err(Error::InvalidSize(format!("row width {w} but {} column flags", active.len())));
    }
    let eligible: Vec<usize> = (0..w)
        .filter(|&x| active[x] && ((x > 0 && row[x - 1]) || (x + 1 < w && row[x + 1])))
        .collect();
    let k = eligible.len();
    let mut dist = BTreeMap::new();
    for sub in 0u32..1 << k {
        let on = sub.count_ones() as i32;
        let prob = theta.powi(on) * (1.0 - theta).powi(k as i32 - on);
        if prob > 0.0 {
            let mask = eligible
                .iter()
                .enumerate()
                .filter(|(j, _)| sub >> j & 1 == 1)
                .fold(0u32, |m, (_, &x)| m | 1 << x);
            dist.insert(mask, prob);
        }
    }
    Ok(dist)
}

/// Rows of exact values keyed by named parameters, written as CSV with
/// header `<params...>,exact_value`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleTable {
    pub columns: Vec<String>,
    pub rows: Vec<(Vec<String>, f64)>,
}

impl OracleTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        OracleTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, params: Vec<String>, exact_value: f64) -> Result<()> {
        if params.len() != self.columns.len() {
            return Err(Error::InvalidSize(format!(
                "{} parameters for {} columns",
                params.len(),
                self.columns.len()
            )));
        }
        self.rows.push((params, exact_value));
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{},exact_value", self.columns.join(","))?;
        for (params, v) in &self.rows {
            writeln!(out, "{},{v}", params.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graphgen::{dilute_bonds, gen_erdos_renyi, gen_path, Graph, GraphKind, Mask};

    fn path(n: usize) -> DilutedGraph {
        DilutedGraph::undiluted(Arc::new(gen_path(n).unwrap()))
    }

    #[test]
    fn small_chains() {
        assert!((exact_mean_extinction(&path(1), 3.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((exact_mean_extinction(&path(2), 2.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((exact_mean_extinction(&path(2), 0.0).unwrap() - 1.5).abs() < 1e-12);
        // K2 closed form 3/2 + lambda/2
        for lambda in [0.3, 1.0, 4.5] {
            let m = exact_mean_extinction(&path(2), lambda).unwrap();
            assert!((m - (1.5 + lambda / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn no_births_gives_harmonic_number() {
        let g = Arc::new(gen_erdos_renyi(11, 3.0, 2).unwrap());
        for d in [DilutedGraph::undiluted(g.clone()), dilute_bonds(g.clone(), 0.0, 0).unwrap()] {
            let lambda = if d.n_open_edges() == 0 { 5.0 } else { 0.0 };
            let h: f64 = (1..=11).map(|k| 1.0 / k as f64).sum();
            assert!((exact_mean_extinction(&d, lambda).unwrap() - h).abs() < 1e-8);
        }
    }

    #[test]
    fn site_mode_three_vertex() {
        // path 0-1 with vertex 1 inert: from {0,1}, deaths at rate 1 each,
        // births only 0 -> 1. From {0}: m0 = 1/(1+l) + l/(1+l) m01.
        // From {1}: 1. From {0,1}: m01 = 1/2 + (m0 + m1)/2.
        let g = Arc::new(gen_path(2).unwrap());
        let d = DilutedGraph::from_mask(g, Mask::Site(vec![true, false]), 0.5, 0).unwrap();
        let l: f64 = 2.0;
        // m01 = 1/2 + 1/2 + m0/2, m0 = (1 + l m01)/(1+l)
        let m01 = (1.0 + 1.0 / (2.0 * (1.0 + l))) / (1.0 - l / (2.0 * (1.0 + l)));
        assert!((exact_mean_extinction(&d, l).unwrap() - m01).abs() < 1e-12);
    }

    #[test]
    fn dense_and_iterative_agree() {
        for (n, lambda) in [(8, 1.5), (9, 2.0), (10, 1.0)] {
            let spec = CtmcSpec::new(&path(n), lambda).unwrap();
            let dense = spec.solve_dense().unwrap();
            let gs = spec.solve_gauss_seidel().unwrap();
            let top = dense.len() - 1;
            assert!((dense[top] / gs[top] - 1.0).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn monotone_in_size_and_rate() {
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let mut prev = 0.0;
            for n in 1..=8 {
                let m = exact_mean_extinction(&path(n), lambda).unwrap();
                assert!(m >= prev, "n={n} lambda={lambda}");
                prev = m;
            }
        }
        let mut prev = 0.0;
        for k in 0..=40 {
            let m = exact_mean_extinction(&path(6), 0.1 * k as f64).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn every_transient_state_can_exit() {
        let spec = CtmcSpec::new(&path(5), 1.0).unwrap();
        assert!((1..32u32).all(|s| spec.exit_rate(s) > 0.0));
        assert_eq!(spec.exit_rate(0), 0.0);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(
            exact_mean_extinction(&path(13), 1.0),
            Err(Error::TooLarge { .. })
        ));
        assert!(exact_mean_extinction(&path(12), 1.0).is_ok());
        assert!(exact_crossing_prob(5, 3, 0.5).is_err());
        assert!(oriented_next_row_dist(&[false; 17], 0.5, &[true; 17]).is_err());
    }

    #[test]
    fn crossing_examples() {
        for p in [0.0, 0.2, 0.9, 1.0] {
            assert!((exact_crossing_prob(1, 0, p).unwrap() - p).abs() < 1e-15);
        }
        assert_eq!(exact_crossing_prob(2, 1, 0.5).unwrap(), 0.5);
        // a single row of w edges crosses only if all are open
        assert!((exact_crossing_prob(4, 0, 0.7).unwrap() - 0.7f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn crossing_duality_identity() {
        for w in 1..=5 {
            for h in 0..=4 {
                if crossing_counts(w, h).is_err() || crossing_counts(h + 1, w - 1).is_err() {
                    continue;
                }
                for p in [0.1, 0.37, 0.5, 0.8] {
                    let s = exact_crossing_prob(w, h, p).unwrap()
                        + exact_crossing_prob(h + 1, w - 1, 1.0 - p).unwrap();
                    assert!((s - 1.0).abs() < 1e-12, "w={w} h={h} p={p}");
                }
            }
        }
    }

    #[test]
    fn next_row_examples() {
        let d = oriented_next_row_dist(&[false; 6], 0.4, &[true; 6]).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(0, 1.0)]);
        let row = [true, false, false, false, true, false];
        let d = oriented_next_row_dist(&row, 1.0, &[true; 6]).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(0b101010, 1.0)]);
        let d = oriented_next_row_dist(&row, 0.3, &[true; 6]).unwrap();
        assert_eq!(d.len(), 8);
        assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-14);
        let mut mask = [true; 6];
        mask[3] = false;
        let d = oriented_next_row_dist(&row, 0.3, &mask).unwrap();
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn table_csv() {
        let mut t = OracleTable::new(["graph", "lambda"]);
        t.push(vec!["path(2)".into(), "2".into()], 2.5).unwrap();
        assert!(t.push(vec!["x".into()], 1.0).is_err());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "graph,lambda,exact_value\npath(2),2,2.5\n");
    }

    #[test]
    fn custom_graph_chain() {
        // triangle, lambda = 0: max of three Exp(1)
        let g = Graph::from_edges(3, vec![(0, 1), (1, 2), (0, 2)], GraphKind::Custom).unwrap();
        let d = DilutedGraph::undiluted(Arc::new(g));
        assert!((exact_mean_extinction(&d, 0.0).unwrap() - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-12);
    }
}
