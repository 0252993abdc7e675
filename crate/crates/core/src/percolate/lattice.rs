//! Crossings, planar duality and the strip construction on square boxes.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::Path;
use crate::error::{Error, Result};
use crate::graphgen::{self, dilute_bonds, gen_lattice2d, DilutedGraph, GraphKind, Mask};
use crate::stats;

/// Inclusive rectangle of grid coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, x1: usize, y0: usize, y1: usize) -> Rect {
        Rect { x0, x1, y0, y1 }
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// From column `x0` to column `x1`.
    LeftRight,
    /// From row `y1` (top) to row `y0` (bottom).
    TopBottom,
}

fn grid_width(dg: &DilutedGraph) -> Result<usize> {
    dg.base().kind().grid_width().ok_or_else(|| Error::WrongKind {
        expected: "lattice2d or its dual",
        found: dg.base().kind().tag(),
    })
}

/// Shortest open crossing of `rect` in the given direction, using only
/// vertices and edges inside the rectangle.
pub fn crossing_path(dg: &DilutedGraph, rect: Rect, orientation: Orientation) -> Result<Option<Path>> {
    let w = grid_width(dg)?;
    if rect.x0 > rect.x1 || rect.y0 > rect.y1 {
        return Err(Error::InvalidParameter(format!("inverted rectangle {rect:?}")));
    }
    let flat = match orientation {
        Orientation::LeftRight => rect.x0 == rect.x1,
        Orientation::TopBottom => rect.y0 == rect.y1,
    };
    if flat {
        return Err(Error::InvalidParameter(format!(
            "rectangle {rect:?} has no extent along the crossing direction"
        )));
    }
    let height = dg.n() / w;
    if rect.x1 >= w || rect.y1 >= height {
        return Err(Error::InvalidParameter(format!(
            "rectangle {rect:?} leaves the {w}x{height} grid"
        )));
    }
    let g = dg.base();
    let id = |x: usize, y: usize| (x + w * y) as u32;
    let mut parent: HashMap<u32, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let (sources, is_target): (Vec<u32>, Box<dyn Fn(usize, usize) -> bool>) = match orientation {
        Orientation::LeftRight => (
            (rect.y0..=rect.y1).map(|y| id(rect.x0, y)).collect(),
            Box::new(move |x, _| x == rect.x1),
        ),
        Orientation::TopBottom => (
            (rect.x0..=rect.x1).map(|x| id(x, rect.y1)).collect(),
            Box::new(move |_, y| y == rect.y0),
        ),
    };
    for s in sources {
        if dg.vertex_present(s) {
            parent.insert(s, u32::MAX);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let (x, y) = (v as usize % w, v as usize / w);
        if is_target(x, y) {
            let mut verts = vec![v];
            let mut cur = v;
            while let Some(&p) = parent.get(&cur) {
                if p == u32::MAX {
                    break;
                }
                verts.push(p);
                cur = p;
            }
            verts.reverse();
            return Ok(Some(Path::new(verts)));
        }
        for nb in g.neighbors(v) {
            let (nx, ny) = (nb.vertex as usize % w, nb.vertex as usize / w);
            if rect.contains(nx, ny)
                && dg.edge_open(nb.edge)
                && dg.vertex_present(nb.vertex)
                && !parent.contains_key(&nb.vertex)
            {
                parent.insert(nb.vertex, v);
                queue.push_back(nb.vertex);
            }
        }
    }
    Ok(None)
}

/// Whether an open path joins the two opposite sides of `rect`.
pub fn has_crossing(dg: &DilutedGraph, rect: Rect, orientation: Orientation) -> Result<bool> {
    Ok(crossing_path(dg, rect, orientation)?.is_some())
}

/// Planar dual configuration: each dual edge is open iff the primal edge it
/// crosses is closed. Applying it twice returns the original mask.
pub fn dual_config(dg: &DilutedGraph) -> Result<DilutedGraph> {
    let Mask::Bond(mask) = dg.mask() else {
        return Err(Error::WrongKind {
            expected: "bond dilution",
            found: dg.mode().to_string(),
        });
    };
    let base = match *dg.base().kind() {
        GraphKind::Lattice2d { side } => graphgen::gen_dual_lattice2d(side)?,
        GraphKind::DualLattice2d { side } => gen_lattice2d(side)?,
        ref other => {
            return Err(Error::WrongKind {
                expected: "lattice2d or its dual",
                found: other.tag(),
            })
        }
    };
    let flipped = mask.iter().map(|&k| !k).collect();
    DilutedGraph::from_mask(Arc::new(base), Mask::Bond(flipped), 1.0 - dg.p(), dg.seed())
}

/// Joins crossings into one path: walk crossing `i` forward from where it
/// was entered, leave it at its first vertex lying on crossing `i + 1`, and
/// continue forward along crossing `i + 1` from there. Any loop the walk
/// closes is erased, so the result is always self-avoiding.
pub fn stitch_paths(crossings: &[Path]) -> Result<Path> {
    let Some(first) = crossings.first() else {
        return Ok(Path::default());
    };
    let mut walk: Vec<u32> = Vec::new();
    let mut entry = 0usize;
    for (i, cur) in crossings.iter().enumerate() {
        let seg = &cur.vertices[entry.min(cur.vertices.len())..];
        match crossings.get(i + 1) {
            None => walk.extend_from_slice(seg),
            Some(next) => {
                let position: HashMap<u32, usize> = next
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| (v, k))
                    .collect();
                let (j, at) = seg
                    .iter()
                    .enumerate()
                    .find_map(|(j, v)| position.get(v).map(|&at| (j, at)))
                    .ok_or(Error::Disjoint(i, i + 1))?;
                walk.extend_from_slice(&seg[..j]);
                entry = at;
            }
        }
    }
    debug_assert!(!walk.is_empty() || first.vertices.is_empty());
    Ok(loop_erase(&walk))
}

fn loop_erase(walk: &[u32]) -> Path {
    let mut out: Vec<u32> = Vec::with_capacity(walk.len());
    let mut index: HashMap<u32, usize> = HashMap::new();
    for &v in walk {
        if let Some(&k) = index.get(&v) {
            for u in out.drain(k + 1..) {
                index.remove(&u);
            }
        } else {
            index.insert(v, out.len());
            out.push(v);
        }
    }
    Path::new(out)
}

/// Long path from alternating strip crossings.
///
/// The `L x L` box is cut into `floor(L / h)` disjoint horizontal strips of
/// height `h = floor(c ln L)`. Odd strips are crossed left to right, even
/// strips right to left, and consecutive strips are joined by a
/// bottom-to-top crossing of an end box spanning both strips (right end
/// after odd strips, left end after even ones). End boxes are taken as
/// narrow as possible, widening up to `h` columns. Returns `None` when a
/// required crossing is missing.
pub fn staircase_long_path(dg: &DilutedGraph, c: f64) -> Result<Option<Path>> {
    let GraphKind::Lattice2d { side } = *dg.base().kind() else {
        return Err(Error::WrongKind {
            expected: "lattice2d",
            found: dg.base().kind().tag(),
        });
    };
    let l = side;
    let h_real = c * (l as f64).ln();
    if !(h_real >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "strip height c ln L = {h_real} must be at least 1"
        )));
    }
    let h = (h_real.floor() as usize).min(l);
    let strips = l / h;
    if l < 2 {
        return Ok(None);
    }
    let max_box = h.min((l - 1) / 2).max(1);
    let mut pieces = Vec::with_capacity(2 * strips);
    for k in 0..strips {
        let rect = Rect::new(0, l - 1, k * h, (k + 1) * h - 1);
        let Some(p) = crossing_path(dg, rect, Orientation::LeftRight)? else {
            return Ok(None);
        };
        pieces.push(if k % 2 == 0 { p } else { p.reversed() });
        if k + 1 == strips {
            break;
        }
        let (y0, y1) = (k * h, (k + 2) * h - 1);
        let mut connector = None;
        for bw in 1..=max_box {
            let rect = if k % 2 == 0 {
                Rect::new(l - bw, l - 1, y0, y1)
            } else {
                Rect::new(0, bw - 1, y0, y1)
            };
            if let Some(q) = crossing_path(dg, rect, Orientation::TopBottom)? {
                connector = Some(q.reversed());
                break;
            }
        }
        match connector {
            Some(q) => pieces.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(stitch_paths(&pieces)?))
}

/// Empirical strip-crossing failure rates and the fitted decay rate.
#[derive(Clone, Debug)]
pub struct StripCalibration {
    /// `(height K, failure fraction)` per probed height.
    pub failure_rates: Vec<(usize, f64)>,
    /// Fitted `gamma` in `P(no crossing of [0,L]x[0,K]) ~ L exp(-gamma K)`.
    pub gamma: f64,
}

/// Estimates the decay rate of left-right crossing failures of `length x K`
/// strips at keep probability `p`, from `samples` configurations per height.
pub fn calibrate_strip_gamma(
    p: f64,
    length: usize,
    heights: &[usize],
    samples: usize,
    seed: u64,
) -> Result<StripCalibration> {
    let side = heights.iter().copied().max().unwrap_or(0).max(length) + 1;
    let base = Arc::new(gen_lattice2d(side)?);
    let mut failure_rates = Vec::with_capacity(heights.len());
    for (hi, &k) in heights.iter().enumerate() {
        let mut fails = 0usize;
        for s in 0..samples {
            let cfg_seed = crate::rng::hash3(seed, hi as u64, s as u64);
            let dg = dilute_bonds(base.clone(), p, cfg_seed)?;
            if !has_crossing(&dg, Rect::new(0, length, 0, k), Orientation::LeftRight)? {
                fails += 1;
            }
        }
        failure_rates.push((k, fails as f64 / samples as f64));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = failure_rates
        .iter()
        .filter(|(_, f)| *f > 0.0)
        .map(|&(k, f)| (k as f64, f.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "fewer than two heights with observed failures; probe smaller heights".into(),
        ));
    }
    let fit = stats::linear_fit(&xs, &ys);
    Ok(StripCalibration {
        failure_rates,
        gamma: -fit.slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::gen_path;

    fn lattice(side: usize, p: f64, seed: u64) -> DilutedGraph {
        dilute_bonds(Arc::new(gen_lattice2d(side).unwrap()), p, seed).unwrap()
    }

    #[test]
    fn crossing_extremes() {
        let full = lattice(6, 1.0, 0);
        let empty = lattice(6, 0.0, 0);
        let r = Rect::new(0, 5, 0, 4);
        assert!(has_crossing(&full, r, Orientation::LeftRight).unwrap());
        assert!(has_crossing(&full, r, Orientation::TopBottom).unwrap());
        assert!(!has_crossing(&empty, r, Orientation::LeftRight).unwrap());
        // flat rectangle across the crossing direction is fine
        let row = Rect::new(0, 5, 2, 2);
        assert!(has_crossing(&full, row, Orientation::LeftRight).unwrap());
    }

    #[test]
    fn crossing_errors() {
        let d = lattice(5, 0.5, 1);
        assert!(crossing_path(&d, Rect::new(3, 2, 0, 4), Orientation::LeftRight).is_err());
        assert!(crossing_path(&d, Rect::new(2, 2, 0, 4), Orientation::LeftRight).is_err());
        assert!(crossing_path(&d, Rect::new(0, 4, 1, 1), Orientation::TopBottom).is_err());
        assert!(crossing_path(&d, Rect::new(0, 5, 0, 4), Orientation::LeftRight).is_err());
        let p = DilutedGraph::undiluted(Arc::new(gen_path(4).unwrap()));
        assert!(matches!(
            has_crossing(&p, Rect::new(0, 1, 0, 0), Orientation::LeftRight),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn crossing_path_is_valid_and_spans() {
        for seed in 0..50 {
            let d = lattice(12, 0.6, seed);
            let r = Rect::new(1, 10, 2, 9);
            if let Some(p) = crossing_path(&d, r, Orientation::LeftRight).unwrap() {
                assert!(p.is_valid(&d));
                let first = d.base().coords(p.vertices[0]).unwrap();
                let last = d.base().coords(*p.vertices.last().unwrap()).unwrap();
                assert_eq!(first.0, 1);
                assert_eq!(last.0, 10);
                assert!(p
                    .vertices
                    .iter()
                    .all(|&v| r.contains(v as usize % 12, v as usize / 12)));
            }
        }
    }

    #[test]
    fn dual_examples() {
        let full = lattice(5, 1.0, 0);
        let dual = dual_config(&full).unwrap();
        assert_eq!(dual.n_open_edges(), 0);
        assert_eq!(*dual.base().kind(), GraphKind::DualLattice2d { side: 5 });
        for seed in 0..20 {
            let d = lattice(7, 0.5, seed);
            let back = dual_config(&dual_config(&d).unwrap()).unwrap();
            assert_eq!(back.mask(), d.mask());
            assert_eq!(back.base().edges(), d.base().edges());
        }
        let site = crate::graphgen::dilute_sites(Arc::new(gen_lattice2d(3).unwrap()), 0.5, 1).unwrap();
        assert!(dual_config(&site).is_err());
    }

    #[test]
    fn dual_edges_cross_primal_edges() {
        // midpoints of paired primal and dual edges coincide
        let side = 6;
        let primal = gen_lattice2d(side).unwrap();
        let dual = graphgen::gen_dual_lattice2d(side).unwrap();
        for (e, (&(a, b), &(c, d))) in primal.edges().iter().zip(dual.edges()).enumerate() {
            let pa = primal.coords(a).unwrap();
            let pb = primal.coords(b).unwrap();
            let dc = dual.coords(c).unwrap();
            let dd = dual.coords(d).unwrap();
            let pm = ((pa.0 + pb.0) as f64 / 2.0, (pa.1 + pb.1) as f64 / 2.0);
            let dm = (
                (dc.0 + dd.0) as f64 / 2.0 - 0.5,
                (dc.1 + dd.1) as f64 / 2.0 - 0.5,
            );
            assert_eq!(pm, dm, "edge {e}");
        }
    }

    /// The `(n+1) x n` primal rectangle `[0,n+1]x[0,n]` and the dual
    /// rectangle shifted by `(1/2,-1/2)`, in dual grid coordinates.
    fn duality_pair(n: usize) -> (Rect, Rect) {
        (Rect::new(0, n + 1, 0, n), Rect::new(1, n + 1, 0, n + 1))
    }

    #[test]
    fn exactly_one_of_primal_lr_and_dual_tb() {
        let n = 8;
        let (primal_rect, dual_rect) = duality_pair(n);
        for seed in 0..500 {
            let d = lattice(n + 2, 0.5, seed);
            let dual = dual_config(&d).unwrap();
            let lr = has_crossing(&d, primal_rect, Orientation::LeftRight).unwrap();
            let tb = has_crossing(&dual, dual_rect, Orientation::TopBottom).unwrap();
            assert!(lr ^ tb, "seed {seed}");
        }
    }

    #[test]
    fn stitch_single_and_pair() {
        let p = Path::new(vec![1, 2, 3]);
        assert_eq!(stitch_paths(std::slice::from_ref(&p)).unwrap(), p);
        // L-R along row 0 of a 4x4 grid, then T-B... here bottom-to-top
        // along column 2, sharing vertex 2
        let lr = Path::new(vec![0, 1, 2, 3]);
        let bt = Path::new(vec![2, 6, 10, 14]);
        let s = stitch_paths(&[lr, bt]).unwrap();
        assert_eq!(s.vertices, vec![0, 1, 2, 6, 10, 14]);
        let err = stitch_paths(&[Path::new(vec![0, 1]), Path::new(vec![5, 6])]);
        assert!(matches!(err, Err(Error::Disjoint(0, 1))));
    }

    #[test]
    fn stitch_erases_loops() {
        let a = Path::new(vec![0, 1, 2, 3]);
        let b = Path::new(vec![3, 7, 6, 5, 1, 9]);
        let c = Path::new(vec![9, 13]);
        // walk 0,1,2,3,7,6,5,1,9,13 revisits 1
        let s = stitch_paths(&[a, b, c]).unwrap();
        assert_eq!(s.vertices, vec![0, 1, 9, 13]);
    }

    #[test]
    fn staircase_all_open() {
        let d = lattice(20, 1.0, 0);
        // h = floor(3.0 * ln 20) = 8 -> two strips
        let path = staircase_long_path(&d, 3.0).unwrap().unwrap();
        assert!(path.is_valid(&d));
        assert!(path.length() >= 2 * 19, "{}", path.length());
    }

    #[test]
    fn staircase_absent_when_closed() {
        let d = lattice(20, 0.0, 0);
        assert_eq!(staircase_long_path(&d, 2.0).unwrap(), None);
        assert!(staircase_long_path(&d, 0.1).is_err());
    }

    #[test]
    fn staircase_paths_are_valid() {
        for seed in 0..200 {
            let d = lattice(30, 0.75, seed);
            if let Some(p) = staircase_long_path(&d, 1.5).unwrap() {
                assert!(p.is_valid(&d), "seed {seed}");
                assert!(p.length() >= 30 / 5 * 20, "seed {seed}: {}", p.length());
            }
        }
    }

    #[test]
    fn calibration_finds_positive_rate() {
        let cal = calibrate_strip_gamma(0.65, 30, &[1, 2, 3, 4], 400, 9).unwrap();
        assert!(cal.gamma > 0.0, "{cal:?}");
        let rates: Vec<f64> = cal.failure_rates.iter().map(|r| r.1).collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0] + 0.05), "{rates:?}");
    }
}
