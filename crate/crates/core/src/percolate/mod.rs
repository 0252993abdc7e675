//! Structural analysis of diluted graphs.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graphgen::{DilutedGraph, DilutionMode, GraphKind};

mod lattice;
mod longest;

pub use lattice::{
    calibrate_strip_gamma, crossing_path, dual_config, has_crossing, staircase_long_path,
    stitch_paths, Orientation, Rect, StripCalibration,
};
pub use longest::{
    expected_path_count, log_expected_path_count, longest_path_dfs, longest_path_exact,
    path_count_unit_root, EXACT_LONGEST_PATH_LIMIT,
};

/// Disjoint-set forest with union by size and path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// Component sizes of one diluted graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterReport {
    /// Sorted in decreasing order.
    pub component_sizes: Vec<usize>,
    pub largest: usize,
    pub n_components: usize,
}

impl ClusterReport {
    /// Number of components of each size.
    pub fn size_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &s in &self.component_sizes {
            *m.entry(s).or_insert(0) += 1;
        }
        m
    }

    pub fn total_vertices(&self) -> usize {
        self.component_sizes.iter().sum()
    }

    /// CSV with header `size,count`, one row per distinct size.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "size,count")?;
        for (s, c) in self.size_counts() {
            writeln!(out, "{s},{c}")?;
        }
        Ok(())
    }
}

/// Components under open-edge connectivity. In site mode only active
/// vertices and edges between two active vertices count.
pub fn components(dg: &DilutedGraph) -> ClusterReport {
    let g = dg.base();
    let mut uf = UnionFind::new(g.n());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if dg.edge_open(e as u32) {
            uf.union(u, v);
        }
    }
    let mut sizes_by_root = vec![0usize; g.n()];
    for v in 0..g.n() as u32 {
        if dg.vertex_present(v) {
            let r = uf.find(v);
            sizes_by_root[r as usize] += 1;
        }
    }
    let mut component_sizes: Vec<usize> = sizes_by_root.into_iter().filter(|&s| s > 0).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    ClusterReport {
        largest: component_sizes.first().copied().unwrap_or(0),
        n_components: component_sizes.len(),
        component_sizes,
    }
}

/// Empirical distribution of component sizes pooled over reports.
#[derive(Clone, Debug, PartialEq)]
pub struct SizePmf {
    /// Fraction of components having each size.
    pub pmf: BTreeMap<usize, f64>,
    pub counts: BTreeMap<usize, u64>,
    pub n_components: u64,
}

impl SizePmf {
    /// Distribution of the size of the component containing a uniformly
    /// chosen vertex: weights `s * count(s)`.
    pub fn size_biased(&self) -> BTreeMap<usize, f64> {
        let total: f64 = self.counts.iter().map(|(&s, &c)| s as f64 * c as f64).sum();
        self.counts
            .iter()
            .map(|(&s, &c)| (s, s as f64 * c as f64 / total))
            .collect()
    }
}

pub fn cluster_size_histogram(reports: &[ClusterReport]) -> Result<SizePmf> {
    if reports.is_empty() {
        return Err(Error::InvalidSize("no cluster reports".into()));
    }
    let mut counts = BTreeMap::new();
    for r in reports {
        for &s in &r.component_sizes {
            *counts.entry(s).or_insert(0u64) += 1;
        }
    }
    let n_components: u64 = counts.values().sum();
    if n_components == 0 {
        return Err(Error::InvalidSize("reports contain no components".into()));
    }
    let pmf = counts
        .iter()
        .map(|(&s, &c)| (s, c as f64 / n_components as f64))
        .collect();
    Ok(SizePmf {
        pmf,
        counts,
        n_components,
    })
}

/// Longest run of consecutive active sites on a site-diluted path.
pub fn max_active_run(dg: &DilutedGraph) -> Result<usize> {
    if *dg.base().kind() != GraphKind::Path1d {
        return Err(Error::WrongKind {
            expected: "path1d",
            found: dg.base().kind().tag(),
        });
    }
    if dg.mode() != DilutionMode::Site {
        return Err(Error::WrongKind {
            expected: "site dilution",
            found: dg.mode().to_string(),
        });
    }
    let (mut best, mut run) = (0, 0);
    for v in 0..dg.n() as u32 {
        if dg.vertex_present(v) {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    Ok(best)
}

/// A self-avoiding path given by its vertex sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<u32>,
}

impl Path {
    pub fn new(vertices: Vec<u32>) -> Path {
        Path { vertices }
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn reversed(&self) -> Path {
        Path::new(self.vertices.iter().rev().copied().collect())
    }

    /// Distinct vertices, each consecutive pair joined by an open edge of
    /// `dg` with both endpoints present.
    pub fn is_valid(&self, dg: &DilutedGraph) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.vertices.len());
        if !self.vertices.iter().all(|&v| (v as usize) < dg.n() && seen.insert(v)) {
            return false;
        }
        if !self.vertices.iter().all(|&v| dg.vertex_present(v)) {
            return false;
        }
        self.vertices.windows(2).all(|w| {
            dg.base()
                .neighbors(w[0])
                .iter()
                .any(|nb| nb.vertex == w[1] && dg.edge_open(nb.edge))
        })
    }

    /// CSV with header `order,vertex`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "order,vertex")?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(out, "{i},{v}")?;
        }
        Ok(())
    }
}
