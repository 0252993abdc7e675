//! Longest self-avoiding paths: exhaustive oracle, randomized DFS heuristic
//! and first-moment path counts.

use rand::seq::SliceRandom;
use statrs::function::gamma::ln_gamma;

use super::{Path, UnionFind};
use crate::error::{Error, Result};
use crate::graphgen::DilutedGraph;
use crate::rng::{self, STREAM_DFS};

/// Effective vertex limit of [`longest_path_exact`].
pub const EXACT_LONGEST_PATH_LIMIT: usize = 20;

/// Exact longest path length (in edges) by dynamic programming over
/// `(visited set, endpoint)` within each component.
pub fn longest_path_exact(dg: &DilutedGraph) -> Result<usize> {
    let g = dg.base();
    let present: Vec<u32> = (0..g.n() as u32).filter(|&v| dg.vertex_present(v)).collect();
    if present.len() > EXACT_LONGEST_PATH_LIMIT {
        return Err(Error::TooLarge {
            what: "effective vertex count",
            actual: present.len(),
            limit: EXACT_LONGEST_PATH_LIMIT,
        });
    }
    let mut uf = UnionFind::new(g.n());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if dg.edge_open(e as u32) {
            uf.union(u, v);
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for &v in &present {
        groups.entry(uf.find(v)).or_default().push(v);
    }
    let mut best = 0;
    for members in groups.values() {
        if members.len() - 1 <= best {
            continue;
        }
        best = best.max(component_longest(dg, members));
    }
    Ok(best)
}

fn component_longest(dg: &DilutedGraph, members: &[u32]) -> usize {
    let m = members.len();
    let local = |v: u32| members.iter().position(|&x| x == v);
    let mut adj = vec![0u32; m];
    for (i, &v) in members.iter().enumerate() {
        for nb in dg.base().neighbors(v) {
            if dg.edge_open(nb.edge) {
                if let Some(j) = local(nb.vertex) {
                    adj[i] |= 1 << j;
                }
            }
        }
    }
    // reach[mask] = set of endpoints of simple paths covering exactly `mask`
    let mut reach = vec![0u32; 1 << m];
    for i in 0..m {
        reach[1 << i] = 1 << i;
    }
    let mut best = 0;
    for mask in 1usize..(1 << m) {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        let len = mask.count_ones() as usize - 1;
        if len > best {
            best = len;
            if best == m - 1 {
                break;
            }
        }
        let mut e = ends;
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut next = adj[v] & !(mask as u32);
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                reach[mask | (1 << w)] |= 1 << w;
            }
        }
    }
    best
}

/// Best root-to-deepest-node path over `restarts` randomized depth-first
/// searches. Each search runs over every component with shuffled root and
/// neighbor orders; odd restarts are rooted at the far end of the best path
/// found so far.
pub fn longest_path_dfs(dg: &DilutedGraph, restarts: usize, seed: u64) -> Path {
    let g = dg.base();
    let n = g.n();
    let present: Vec<u32> = (0..n as u32).filter(|&v| dg.vertex_present(v)).collect();
    if present.is_empty() {
        return Path::default();
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut open_adj = Vec::new();
    offsets.push(0);
    for v in 0..n as u32 {
        if dg.vertex_present(v) {
            open_adj.extend(
                g.neighbors(v)
                    .iter()
                    .filter(|nb| dg.edge_open(nb.edge))
                    .map(|nb| nb.vertex),
            );
        }
        offsets.push(open_adj.len());
    }

    let mut best = Path::default();
    let mut visited = vec![false; n];
    let mut parent = vec![u32::MAX; n];
    let mut depth = vec![0u32; n];
    let mut stack: Vec<(u32, usize)> = Vec::new();
    for r in 0..restarts.max(1) {
        let mut rng = rng::stream_rng(rng::hash3(seed, STREAM_DFS, r as u64), STREAM_DFS);
        for v in 0..n {
            open_adj[offsets[v]..offsets[v + 1]].shuffle(&mut rng);
        }
        let mut order = present.clone();
        order.shuffle(&mut rng);
        if r % 2 == 1 {
            if let Some(&end) = best.vertices.last() {
                let pos = order.iter().position(|&v| v == end).unwrap();
                order.swap(0, pos);
            }
        }
        visited.iter_mut().for_each(|x| *x = false);
        let (mut deepest, mut deepest_depth) = (order[0], 0u32);
        for &root in &order {
            if visited[root as usize] {
                continue;
            }
            visited[root as usize] = true;
            parent[root as usize] = u32::MAX;
            depth[root as usize] = 0;
            stack.push((root, offsets[root as usize]));
            while let Some(top) = stack.last_mut() {
                let v = top.0 as usize;
                if top.1 == offsets[v + 1] {
                    stack.pop();
                    continue;
                }
                let w = open_adj[top.1];
                top.1 += 1;
                if !visited[w as usize] {
                    visited[w as usize] = true;
                    parent[w as usize] = v as u32;
                    let d = depth[v] + 1;
                    depth[w as usize] = d;
                    if d > deepest_depth {
                        deepest_depth = d;
                        deepest = w;
                    }
                    stack.push((w, offsets[w as usize]));
                }
            }
        }
        if deepest_depth as usize + 1 > best.vertices.len() {
            let mut verts = Vec::with_capacity(deepest_depth as usize + 1);
            let mut v = deepest;
            while v != u32::MAX {
                verts.push(v);
                v = parent[v as usize];
            }
            verts.reverse();
            best = Path::new(verts);
        }
    }
    best
}

/// `ln` of `n (n-1) ... (n-k+1) (nu/n)^(k-1)`, the expected number of
/// self-avoiding paths on `k` vertices in `ER(n, nu/n)`. Real `k` is
/// accepted through the gamma function.
pub fn log_expected_path_count(n: usize, k: f64, nu: f64) -> Result<f64> {
    if !(k >= 1.0) || k > n as f64 {
        return Err(Error::InvalidParameter(format!(
            "path vertex count k = {k} must lie in [1, n = {n}]"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("nu must be positive, got {nu}")));
    }
    let n = n as f64;
    Ok(ln_gamma(n + 1.0) - ln_gamma(n - k + 1.0) + (k - 1.0) * (nu / n).ln())
}

/// Expected path count for integer `k`, evaluated as a log-space product.
pub fn expected_path_count(n: usize, k: usize, nu: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "path vertex count k = {k} must lie in [1, n = {n}]"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("nu must be positive, got {nu}")));
    }
    let nf = n as f64;
    let log: f64 = (0..k).map(|i| (nf - i as f64).ln()).sum::<f64>() + (k - 1) as f64 * (nu / nf).ln();
    Ok(log.exp())
}

/// Real `k` at which the expected path count equals one (`nu < 1`).
pub fn path_count_unit_root(n: usize, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("need 0 < nu < 1, got {nu}")));
    }
    let f = |k: f64| log_expected_path_count(n, k, nu);
    let (mut lo, mut hi) = (1.0, n as f64);
    if f(lo)? <= 0.0 || f(hi)? >= 0.0 {
        return Err(Error::Domain(format!("no unit crossing for n = {n}, nu = {nu}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graphgen::{
        dilute_bonds, dilute_sites, gen_erdos_renyi, gen_path, Graph, GraphKind, Mask,
    };

    fn full(g: Graph) -> DilutedGraph {
        DilutedGraph::undiluted(Arc::new(g))
    }

    fn star(k: u32) -> Graph {
        Graph::from_edges(k as usize + 1, (1..=k).map(|i| (0, i)).collect(), GraphKind::Custom)
            .unwrap()
    }

    #[test]
    fn exact_small_cases() {
        let k3 = Graph::from_edges(3, vec![(0, 1), (1, 2), (0, 2)], GraphKind::Custom).unwrap();
        assert_eq!(longest_path_exact(&full(k3)).unwrap(), 2);
        assert_eq!(longest_path_exact(&full(gen_path(7).unwrap())).unwrap(), 6);
        assert_eq!(longest_path_exact(&full(star(4))).unwrap(), 2);
        assert!(matches!(
            longest_path_exact(&full(gen_path(21).unwrap())),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn exact_respects_site_mask() {
        // 21 vertices but only 20 active: allowed
        let g = Arc::new(gen_path(21).unwrap());
        let mut a = vec![true; 21];
        a[5] = false;
        let d = DilutedGraph::from_mask(g, Mask::Site(a), 0.9, 0).unwrap();
        assert_eq!(longest_path_exact(&d).unwrap(), 14);
    }

    /// Brute-force enumeration of simple paths, independent of the bitmask
    /// dynamic program.
    fn brute_longest(dg: &DilutedGraph) -> usize {
        fn extend(dg: &DilutedGraph, v: u32, seen: &mut Vec<bool>, len: usize, best: &mut usize) {
            *best = (*best).max(len);
            for nb in dg.base().neighbors(v) {
                let w = nb.vertex as usize;
                if dg.edge_open(nb.edge) && dg.vertex_present(nb.vertex) && !seen[w] {
                    seen[w] = true;
                    extend(dg, nb.vertex, seen, len + 1, best);
                    seen[w] = false;
                }
            }
        }
        let mut best = 0;
        let mut seen = vec![false; dg.n()];
        for v in 0..dg.n() as u32 {
            if dg.vertex_present(v) {
                seen[v as usize] = true;
                extend(dg, v, &mut seen, 0, &mut best);
                seen[v as usize] = false;
            }
        }
        best
    }

    #[test]
    fn exact_matches_brute_force_and_bounds_dfs() {
        for seed in 0..120u64 {
            let n = 6 + (seed % 10) as usize;
            let g = Arc::new(gen_erdos_renyi(n, 3.5, seed).unwrap());
            let d = if seed % 3 == 0 {
                dilute_sites(g, 0.8, seed).unwrap()
            } else {
                dilute_bonds(g, 0.8, seed).unwrap()
            };
            let exact = longest_path_exact(&d).unwrap();
            assert_eq!(exact, brute_longest(&d), "seed {seed}");
            let h = longest_path_dfs(&d, 8, seed);
            assert!(h.is_valid(&d), "seed {seed}");
            assert!(h.length() <= exact, "seed {seed}");
        }
    }

    #[test]
    fn dfs_finds_full_path_on_path_graph() {
        let d = full(gen_path(50).unwrap());
        let p = longest_path_dfs(&d, 4, 3);
        assert!(p.is_valid(&d));
        assert_eq!(p.length(), 49);
    }

    #[test]
    fn dfs_on_all_inert_graph_is_empty() {
        let g = Arc::new(gen_path(5).unwrap());
        let d = dilute_sites(g, 0.0, 1).unwrap();
        assert_eq!(longest_path_dfs(&d, 3, 1).length(), 0);
    }

    #[test]
    fn dfs_long_path_in_supercritical_er() {
        let g = Arc::new(gen_erdos_renyi(100_000, 1.5, 5).unwrap());
        let d = DilutedGraph::undiluted(g);
        let p = longest_path_dfs(&d, 4, 5);
        assert!(p.is_valid(&d));
        assert!(p.length() as f64 >= 0.01 * 100_000.0, "{}", p.length());
    }

    #[test]
    fn path_counts() {
        // 10 * 9 * 0.05
        assert!((expected_path_count(10, 2, 0.5).unwrap() - 4.5).abs() < 1e-12);
        assert!((expected_path_count(37, 1, 0.3).unwrap() - 37.0).abs() < 1e-9);
        assert!(expected_path_count(5, 6, 0.5).is_err());
        let l = log_expected_path_count(10, 2.0, 0.5).unwrap();
        assert!((l - 4.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unit_root_near_log_scale() {
        let n = 100_000;
        let k = path_count_unit_root(n, 0.5).unwrap();
        let k1 = (n as f64).ln() / 2f64.ln();
        // N nu^(k-1) = 1 puts the root one vertex above log N / log(1/nu)
        assert!((k - 1.0 - k1).abs() < 0.01, "{k} vs {k1}");
        assert!((k - k1).abs() < 1.5);
    }
}
