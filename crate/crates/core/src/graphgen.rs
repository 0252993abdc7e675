//! Graph families and reproducible bond/site dilution.
//!
//! Vertices are `u32` indices. Square lattices are indexed row-major,
//! vertex `(i, j)` is `i + L * j`, with `i` the column (x) and `j` the row
//! (y). Edges of a lattice are listed horizontal bonds first (row by row),
//! then vertical bonds.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{check_prob, Error, Result};
use crate::rng::{self, STREAM_BOND, STREAM_ER, STREAM_SITE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphKind {
    Path1d,
    Lattice2d { side: usize },
    /// The shifted dual of `Lattice2d { side }`: an `(side+1)^2` grid of
    /// dual vertices at half-integer positions, carrying exactly one edge
    /// per primal edge (same edge index).
    DualLattice2d { side: usize },
    ErdosRenyi { mu: f64 },
    /// Induced subgraph or hand-built edge list.
    Custom,
}

impl GraphKind {
    /// Width of the vertex grid for lattice-like kinds.
    pub fn grid_width(&self) -> Option<usize> {
        match *self {
            GraphKind::Lattice2d { side } => Some(side),
            GraphKind::DualLattice2d { side } => Some(side + 1),
            _ => None,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            GraphKind::Path1d => "path1d".into(),
            GraphKind::Lattice2d { side } => format!("lattice2d({side})"),
            GraphKind::DualLattice2d { side } => format!("dual_lattice2d({side})"),
            GraphKind::ErdosRenyi { mu } => format!("erdos_renyi({mu})"),
            GraphKind::Custom => "custom".into(),
        }
    }

    pub fn parse_tag(tag: &str) -> Option<GraphKind> {
        if tag == "path1d" {
            return Some(GraphKind::Path1d);
        }
        if tag == "custom" {
            return Some(GraphKind::Custom);
        }
        let open = tag.find('(')?;
        let inner = tag.strip_suffix(')')?.get(open + 1..)?;
        match &tag[..open] {
            "lattice2d" => inner.parse().ok().map(|side| GraphKind::Lattice2d { side }),
            "dual_lattice2d" => inner
                .parse()
                .ok()
                .map(|side| GraphKind::DualLattice2d { side }),
            "erdos_renyi" => inner.parse().ok().map(|mu| GraphKind::ErdosRenyi { mu }),
            _ => None,
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// One adjacency slot: neighbor and the undirected edge leading to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub vertex: u32,
    pub edge: u32,
}

/// Immutable simple undirected graph with CSR adjacency.
///
/// Every undirected edge owns two adjacency slots, one per direction; slot
/// indices double as directed-edge ids in the simulator.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    slots: Vec<Neighbor>,
    reverse: Vec<u32>,
    kind: GraphKind,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops and duplicates.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>, kind: GraphKind) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidSize("graph must have at least one vertex".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::TooLarge {
                what: "vertex count",
                actual: n,
                limit: u32::MAX as usize,
            });
        }
        let mut seen: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge {{{u}, {v}}} out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            seen.push((u.min(v), u.max(v)));
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge {{{}, {}}}",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::build(n, edges, kind))
    }

    fn build(n: usize, edges: Vec<(u32, u32)>, kind: GraphKind) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut slots = vec![Neighbor { vertex: 0, edge: 0 }; 2 * edges.len()];
        let mut reverse = vec![0u32; 2 * edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            let su = fill[u as usize];
            let sv = fill[v as usize];
            fill[u as usize] += 1;
            fill[v as usize] += 1;
            slots[su] = Neighbor { vertex: v, edge: e as u32 };
            slots[sv] = Neighbor { vertex: u, edge: e as u32 };
            reverse[su] = sv as u32;
            reverse[sv] = su as u32;
        }
        Graph {
            n,
            edges,
            offsets,
            slots,
            reverse,
            kind,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn neighbors(&self, v: u32) -> &[Neighbor] {
        let v = v as usize;
        &self.slots[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Slot range of vertex `v`; slot ids index [`Graph::slot`].
    pub fn slot_range(&self, v: u32) -> std::ops::Range<usize> {
        let v = v as usize;
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn slot(&self, s: usize) -> Neighbor {
        self.slots[s]
    }

    /// The slot for the opposite direction of slot `s`.
    pub fn reverse_slot(&self, s: usize) -> usize {
        self.reverse[s] as usize
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    /// Grid coordinates of a vertex for lattice-like kinds.
    pub fn coords(&self, v: u32) -> Option<(usize, usize)> {
        let w = self.kind.grid_width()?;
        Some((v as usize % w, v as usize / w))
    }

    pub fn edge_count_mean_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// Induced subgraph on the vertices where `keep` is true. Returns the
    /// subgraph and the original index of each new vertex.
    pub fn induced(&self, keep: &[bool]) -> Result<(Graph, Vec<u32>)> {
        let mut new_index = vec![u32::MAX; self.n];
        let mut original = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                new_index[v] = original.len() as u32;
                original.push(v as u32);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u as usize] && keep[v as usize])
            .map(|&(u, v)| (new_index[u as usize], new_index[v as usize]))
            .collect();
        if original.is_empty() {
            return Err(Error::InvalidSize("induced subgraph is empty".into()));
        }
        Ok((Self::build(original.len(), edges, GraphKind::Custom), original))
    }

    /// Writes `n <count> kind <tag>` followed by one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n {} kind {}", self.n, self.kind.tag())?;
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        if fields.len() != 4 || fields[0] != "n" || fields[2] != "kind" {
            return Err(parse_err(1, "expected `n <count> kind <tag>`"));
        }
        let n: usize = fields[1].parse().map_err(|_| parse_err(1, "bad vertex count"))?;
        let kind = GraphKind::parse_tag(fields[3]).ok_or_else(|| parse_err(1, "unknown kind tag"))?;
        let mut edges = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<u32> {
                it.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(i + 1, "expected `u v`"))
            };
            edges.push((next()?, next()?));
        }
        Graph::from_edges(n, edges, kind)
    }
}

/// Path on `n` vertices with edges `{i, i+1}`.
pub fn gen_path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("path needs n >= 1".into()));
    }
    let edges = (0..n.saturating_sub(1) as u32).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, edges, GraphKind::Path1d)
}

/// `L x L` box of the square lattice with nearest-neighbor bonds.
pub fn gen_lattice2d(side: usize) -> Result<Graph> {
    if side == 0 {
        return Err(Error::InvalidSize("lattice needs L >= 1".into()));
    }
    let l = side as u32;
    let mut edges = Vec::with_capacity(2 * side * (side - 1));
    for j in 0..l {
        for i in 0..l - 1 {
            edges.push((i + l * j, i + 1 + l * j));
        }
    }
    for j in 0..l - 1 {
        for i in 0..l {
            edges.push((i + l * j, i + l * (j + 1)));
        }
    }
    Graph::from_edges(side * side, edges, GraphKind::Lattice2d { side })
}

/// Dual grid of an `L x L` box. Dual vertex `(a, b)` sits at
/// `(a - 1/2, b - 1/2)`; edge `e` crosses primal edge `e`.
pub(crate) fn gen_dual_lattice2d(side: usize) -> Result<Graph> {
    if side == 0 {
        return Err(Error::InvalidSize("lattice needs L >= 1".into()));
    }
    let w = side as u32 + 1;
    let l = side as u32;
    let mut edges = Vec::with_capacity(2 * side * (side - 1));
    // primal horizontal (x,y)-(x+1,y) <-> dual vertical (x+1,y)-(x+1,y+1)
    for y in 0..l {
        for x in 0..l - 1 {
            edges.push((x + 1 + w * y, x + 1 + w * (y + 1)));
        }
    }
    // primal vertical (x,y)-(x,y+1) <-> dual horizontal (x,y+1)-(x+1,y+1)
    for y in 0..l - 1 {
        for x in 0..l {
            edges.push((x + w * (y + 1), x + 1 + w * (y + 1)));
        }
    }
    Graph::from_edges((side + 1) * (side + 1), edges, GraphKind::DualLattice2d { side })
}

/// Erdős–Rényi graph: each pair is an edge independently with
/// probability `mu / n`. Pairs are visited by geometric skipping.
pub fn gen_erdos_renyi(n: usize, mu: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("graph needs n >= 1".into()));
    }
    if !(mu >= 0.0) || mu > n as f64 {
        return Err(Error::InvalidProbability {
            what: "edge probability mu/n",
            value: mu / n as f64,
        });
    }
    let q = mu / n as f64;
    let mut edges = Vec::new();
    if q >= 1.0 {
        for v in 1..n as u32 {
            for u in 0..v {
                edges.push((u, v));
            }
        }
    } else if q > 0.0 {
        let mut rng = rng::stream_rng(seed, STREAM_ER);
        let log_q = (-q).ln_1p();
        let (mut v, mut w) = (1i64, -1i64);
        let n = n as i64;
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v && v < n {
                w -= v;
                v += 1;
            }
            if v < n {
                edges.push((w as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n, edges, GraphKind::ErdosRenyi { mu })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilutionMode {
    Bond,
    Site,
}

impl fmt::Display for DilutionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DilutionMode::Bond => "bond",
            DilutionMode::Site => "site",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mask {
    /// Per-edge kept flag.
    Bond(Vec<bool>),
    /// Per-vertex active flag.
    Site(Vec<bool>),
}

/// A base graph plus a bond or site dilution mask.
#[derive(Clone, Debug)]
pub struct DilutedGraph {
    base: Arc<Graph>,
    mask: Mask,
    p: f64,
    seed: u64,
}

impl DilutedGraph {
    /// Wraps an explicit mask; used for deserialization and hand-built cases.
    pub fn from_mask(base: Arc<Graph>, mask: Mask, p: f64, seed: u64) -> Result<DilutedGraph> {
        check_prob("keep probability", p)?;
        let (len, expected) = match &mask {
            Mask::Bond(m) => (m.len(), base.n_edges()),
            Mask::Site(m) => (m.len(), base.n()),
        };
        if len != expected {
            return Err(Error::InvalidSize(format!(
                "mask has {len} flags, graph needs {expected}"
            )));
        }
        Ok(DilutedGraph { base, mask, p, seed })
    }

    /// All edges kept.
    pub fn undiluted(base: Arc<Graph>) -> DilutedGraph {
        let m = base.n_edges();
        DilutedGraph {
            base,
            mask: Mask::Bond(vec![true; m]),
            p: 1.0,
            seed: 0,
        }
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<Graph> {
        &self.base
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn mode(&self) -> DilutionMode {
        match self.mask {
            Mask::Bond(_) => DilutionMode::Bond,
            Mask::Site(_) => DilutionMode::Site,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Whether the vertex takes part in structural statistics (every vertex
    /// in bond mode, active vertices in site mode).
    #[inline]
    pub fn vertex_present(&self, v: u32) -> bool {
        match &self.mask {
            Mask::Bond(_) => true,
            Mask::Site(a) => a[v as usize],
        }
    }

    /// Whether the vertex can give birth.
    #[inline]
    pub fn birth_capable(&self, v: u32) -> bool {
        self.vertex_present(v)
    }

    /// Structural openness: kept bond, or both endpoints active.
    #[inline]
    pub fn edge_open(&self, e: u32) -> bool {
        match &self.mask {
            Mask::Bond(m) => m[e as usize],
            Mask::Site(a) => {
                let (u, v) = self.base.edges[e as usize];
                a[u as usize] && a[v as usize]
            }
        }
    }

    /// Whether a birth from `from` can cross edge `e`.
    #[inline]
    pub fn transmits(&self, from: u32, e: u32) -> bool {
        match &self.mask {
            Mask::Bond(m) => m[e as usize],
            Mask::Site(a) => a[from as usize],
        }
    }

    pub fn n_present(&self) -> usize {
        match &self.mask {
            Mask::Bond(_) => self.base.n(),
            Mask::Site(a) => a.iter().filter(|&&x| x).count(),
        }
    }

    pub fn n_open_edges(&self) -> usize {
        (0..self.base.n_edges() as u32).filter(|&e| self.edge_open(e)).count()
    }

    /// Removes inert vertices: the induced subgraph on active vertices, fully
    /// kept, plus the original index of each retained vertex. Bond mode keeps
    /// all vertices and drops deleted edges.
    pub fn restrict(&self) -> Result<(DilutedGraph, Vec<u32>)> {
        let (g, original) = match &self.mask {
            Mask::Site(a) => self.base.induced(a)?,
            Mask::Bond(m) => {
                let edges = self
                    .base
                    .edges
                    .iter()
                    .zip(m)
                    .filter(|(_, &k)| k)
                    .map(|(&e, _)| e)
                    .collect();
                (
                    Graph::build(self.base.n(), edges, GraphKind::Custom),
                    (0..self.base.n() as u32).collect(),
                )
            }
        };
        Ok((DilutedGraph::undiluted(Arc::new(g)), original))
    }

    /// Short stable fingerprint of structure and mask.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.base.n.to_le_bytes());
        h.update(self.base.kind.tag().as_bytes());
        for &(u, v) in &self.base.edges {
            h.update(u.to_le_bytes());
            h.update(v.to_le_bytes());
        }
        let (tag, flags) = match &self.mask {
            Mask::Bond(m) => (b'b', m),
            Mask::Site(m) => (b's', m),
        };
        h.update([tag]);
        h.update(flags.iter().map(|&f| f as u8).collect::<Vec<u8>>());
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Writes `mask <mode> p <p> seed <seed> count <m>` then one 0/1 per line.
    pub fn write_mask<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let flags = match &self.mask {
            Mask::Bond(m) | Mask::Site(m) => m,
        };
        writeln!(
            out,
            "mask {} p {} seed {} count {}",
            self.mode(),
            self.p,
            self.seed,
            flags.len()
        )?;
        for &f in flags {
            writeln!(out, "{}", f as u8)?;
        }
        Ok(())
    }

    pub fn read_mask<R: BufRead>(base: Arc<Graph>, input: R) -> Result<DilutedGraph> {
        let mut lines = input.lines();
        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 8 || f[0] != "mask" || f[2] != "p" || f[4] != "seed" || f[6] != "count" {
            return Err(bad(1, "expected `mask <mode> p <p> seed <seed> count <m>`"));
        }
        let p: f64 = f[3].parse().map_err(|_| bad(1, "bad p"))?;
        let seed: u64 = f[5].parse().map_err(|_| bad(1, "bad seed"))?;
        let count: usize = f[7].parse().map_err(|_| bad(1, "bad count"))?;
        let mut flags = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let line = line?;
            match line.trim() {
                "" => continue,
                "0" => flags.push(false),
                "1" => flags.push(true),
                _ => return Err(bad(i + 2, "expected 0 or 1")),
            }
        }
        if flags.len() != count {
            return Err(bad(1, "flag count does not match header"));
        }
        let mask = match f[1] {
            "bond" => Mask::Bond(flags),
            "site" => Mask::Site(flags),
            _ => return Err(bad(1, "mode must be bond or site")),
        };
        DilutedGraph::from_mask(base, mask, p, seed)
    }
}

/// Keeps each edge independently with probability `p`. The decision for
/// edge `e` uses the uniform at `(seed, e)`, so masks are nested in `p`.
pub fn dilute_bonds(g: Arc<Graph>, p: f64, seed: u64) -> Result<DilutedGraph> {
    check_prob("keep probability", p)?;
    let mask = (0..g.n_edges() as u64)
        .map(|e| rng::uniform(seed, STREAM_BOND, e) < p)
        .collect();
    DilutedGraph::from_mask(g, Mask::Bond(mask), p, seed)
}

/// Marks each vertex active independently with probability `p`. Inert
/// vertices stay in the graph.
pub fn dilute_sites(g: Arc<Graph>, p: f64, seed: u64) -> Result<DilutedGraph> {
    check_prob("keep probability", p)?;
    let mask = (0..g.n() as u64)
        .map(|v| rng::uniform(seed, STREAM_SITE, v) < p)
        .collect();
    DilutedGraph::from_mask(g, Mask::Site(mask), p, seed)
}
