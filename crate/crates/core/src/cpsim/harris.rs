use rand::Rng;
use rand_distr::Exp1;

use super::ExtinctionTime;
use crate::error::{Error, Result};
use crate::graphgen::DilutedGraph;
use crate::rng::sim_rng;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Mark {
    Death(u32),
    Arrow(u32, u32),
}

/// Graphical construction: death marks at rate 1 on every vertex and birth
/// arrows at rate `lambda` on every transmitting directed edge, fixed up to
/// `t_max`. Runs from different initial sets read the same marks, which
/// gives the monotone coupling.
#[derive(Clone, Debug)]
pub struct HarrisConstruction {
    n: usize,
    t_max: f64,
    marks: Vec<(f64, Mark)>,
}

impl HarrisConstruction {
    pub fn sample(dg: &DilutedGraph, lambda: f64, t_max: f64, seed: u64) -> Result<Self> {
        if !(lambda >= 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need lambda >= 0 and finite t_max >= 0, got {lambda}, {t_max}"
            )));
        }
        let g = dg.base();
        let arrows: Vec<(u32, u32)> = (0..g.n() as u32)
            .flat_map(|x| {
                g.neighbors(x)
                    .iter()
                    .filter(move |nb| dg.transmits(x, nb.edge))
                    .map(move |nb| (x, nb.vertex))
            })
            .collect();
        let deaths = g.n() as f64;
        let total = deaths + lambda * arrows.len() as f64;
        let mut rng = sim_rng(seed);
        let mut marks = Vec::new();
        let mut t = 0.0;
        if total > 0.0 {
            loop {
                let e: f64 = rng.sample(Exp1);
                t += e / total;
                if t > t_max {
                    break;
                }
                let mark = if rng.random::<f64>() * total < deaths {
                    Mark::Death(rng.random_range(0..g.n()) as u32)
                } else {
                    let (x, y) = arrows[rng.random_range(0..arrows.len())];
                    Mark::Arrow(x, y)
                };
                marks.push((t, mark));
            }
        }
        Ok(HarrisConstruction {
            n: g.n(),
            t_max,
            marks,
        })
    }

    fn check(&self, initial: &[bool]) -> Result<()> {
        if initial.len() != self.n {
            return Err(Error::InvalidSize(format!(
                "initial state has {} entries for {} vertices",
                initial.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Occupied sets at each of `times` (sorted, at most `t_max`).
    pub fn evolve(&self, initial: &[bool], times: &[f64]) -> Result<Vec<Vec<bool>>> {
        self.check(initial)?;
        let mut occ = initial.to_vec();
        let mut out = Vec::with_capacity(times.len());
        let mut k = 0;
        for &t in times {
            if t > self.t_max {
                return Err(Error::InvalidParameter(format!("time {t} beyond t_max")));
            }
            while k < self.marks.len() && self.marks[k].0 <= t {
                apply(&mut occ, self.marks[k].1);
                k += 1;
            }
            out.push(occ.clone());
        }
        Ok(out)
    }

    pub fn extinction_time(&self, initial: &[bool]) -> Result<ExtinctionTime> {
        self.check(initial)?;
        let mut occ = initial.to_vec();
        let mut count = occ.iter().filter(|&&o| o).count();
        if count == 0 {
            return Ok(ExtinctionTime { time: 0.0, censored: false });
        }
        for &(t, mark) in &self.marks {
            match mark {
                Mark::Death(v) if occ[v as usize] => count -= 1,
                Mark::Arrow(x, y) if occ[x as usize] && !occ[y as usize] => count += 1,
                _ => {}
            }
            apply(&mut occ, mark);
            if count == 0 {
                return Ok(ExtinctionTime { time: t, censored: false });
            }
        }
        Ok(ExtinctionTime {
            time: self.t_max,
            censored: true,
        })
    }
}

fn apply(occ: &mut [bool], mark: Mark) {
    match mark {
        Mark::Death(v) => occ[v as usize] = false,
        Mark::Arrow(x, y) => {
            if occ[x as usize] {
                occ[y as usize] = true;
            }
        }
    }
}
