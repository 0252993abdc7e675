//! Contact process dynamics and the discrete oriented model.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphgen::DilutedGraph;

mod contact;
mod harris;
mod oriented;

pub use contact::{extinction_time, run_contact, run_contact_from, ContactState};
pub use harris::HarrisConstruction;
pub use oriented::{run_oriented, OrientedConfig};

/// Absorption time, or `t_max` with `censored` set when the run was cut off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtinctionTime {
    pub time: f64,
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `(time, occupied count)` with strictly increasing times.
    pub samples: Vec<(f64, u64)>,
    pub extinction: ExtinctionTime,
    pub seed: u64,
    /// `lambda` for the contact process, `theta` for the oriented model.
    pub rate: f64,
    /// Fingerprint of the diluted graph, or a strip description.
    pub graph: String,
}

impl Trajectory {
    /// Count recorded at sample time `t`, and 0 at any time after extinction.
    pub fn count_at(&self, t: f64) -> Option<u64> {
        if !self.extinction.censored && t >= self.extinction.time {
            return Some(0);
        }
        self.samples.iter().find(|s| s.0 == t).map(|s| s.1)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# seed={} lambda={} graph={}", self.seed, self.rate, self.graph)?;
        writeln!(out, "time,count")?;
        for (t, c) in &self.samples {
            writeln!(out, "{t},{c}")?;
        }
        Ok(())
    }
}

/// Occupied fraction at each sample.
pub fn density(traj: &Trajectory, n_vertices: usize) -> Result<Vec<(f64, f64)>> {
    if n_vertices == 0 {
        return Err(Error::InvalidSize("density needs at least one vertex".into()));
    }
    Ok(traj
        .samples
        .iter()
        .map(|&(t, c)| (t, c as f64 / n_vertices as f64))
        .collect())
}

/// Mean occupied fraction over runs at each time in `times`; every run must
/// either have a sample there or be extinct by then.
pub fn mean_density(trajs: &[Trajectory], times: &[f64], n_vertices: usize) -> Result<Vec<f64>> {
    if trajs.is_empty() || n_vertices == 0 {
        return Err(Error::InvalidSize("need at least one run and one vertex".into()));
    }
    times
        .iter()
        .map(|&t| {
            let mut sum = 0u64;
            for tr in trajs {
                sum += tr.count_at(t).ok_or_else(|| {
                    Error::InvalidParameter(format!("run with seed {} has no sample at t={t}", tr.seed))
                })?;
            }
            Ok(sum as f64 / (trajs.len() * n_vertices) as f64)
        })
        .collect()
}

/// Extinction times of `reps` independent runs from all occupied; run `i`
/// uses seed `seed + i`. Runs execute on the rayon pool; output order is by
/// replicate.
pub fn survival_times(
    dg: &DilutedGraph,
    lambda: f64,
    reps: usize,
    t_max: f64,
    seed: u64,
) -> Result<Vec<ExtinctionTime>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replicate".into()));
    }
    (0..reps as u64)
        .into_par_iter()
        .map(|i| extinction_time(dg, lambda, t_max, seed.wrapping_add(i)))
        .collect()
}

/// CSV with header `replicate,extinction_time,censored`.
pub fn write_extinction_csv<W: Write>(times: &[ExtinctionTime], mut out: W) -> std::io::Result<()> {
    writeln!(out, "replicate,extinction_time,censored")?;
    for (i, e) in times.iter().enumerate() {
        writeln!(out, "{i},{},{}", e.time, e.censored)?;
    }
    Ok(())
}
