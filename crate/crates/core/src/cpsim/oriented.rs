use rand::Rng;

use super::{ExtinctionTime, Trajectory};
use crate::error::{check_prob, Error, Result};
use crate::rng::{sim_rng, uniform, SimRng, STREAM_SITE};

/// One row of the oriented model on a strip of `width` columns.
///
/// Site `(x, n + 1)` can be occupied when column `x` is active and `(x - 1, n)`
/// or `(x + 1, n)` is occupied; it then is occupied with probability `theta`.
/// Boundaries are closed. Starting from a row supported on one parity class
/// keeps every later row on sites with `x + n` even.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedConfig {
    pub generation: usize,
    pub row: Vec<bool>,
    pub theta: f64,
    pub active: Vec<bool>,
}

impl OrientedConfig {
    pub fn new(row: Vec<bool>, theta: f64, active: Vec<bool>) -> Result<Self> {
        check_prob("theta", theta)?;
        if row.len() != active.len() {
            return Err(Error::InvalidSize(format!(
                "row width {} but {} column flags",
                row.len(),
                active.len()
            )));
        }
        Ok(OrientedConfig {
            generation: 0,
            row,
            theta,
            active,
        })
    }

    pub fn width(&self) -> usize {
        self.row.len()
    }

    pub fn count(&self) -> usize {
        self.row.iter().filter(|&&o| o).count()
    }

    /// Whether column `x` can be occupied in the next generation.
    pub fn eligible(&self, x: usize) -> bool {
        self.active[x]
            && ((x > 0 && self.row[x - 1]) || (x + 1 < self.width() && self.row[x + 1]))
    }

    pub fn step(&mut self, rng: &mut SimRng) {
        let next: Vec<bool> = (0..self.width())
            .map(|x| self.eligible(x) && rng.random::<f64>() < self.theta)
            .collect();
        self.row = next;
        self.generation += 1;
    }
}

/// Oriented model from the fully occupied even-column row; the count is
/// recorded each generation until the row empties or `max_generations`.
/// Columns are active independently with probability `site_keep_p`.
pub fn run_oriented(
    width: usize,
    theta: f64,
    site_keep_p: f64,
    max_generations: usize,
    seed: u64,
) -> Result<Trajectory> {
    check_prob("site keep probability", site_keep_p)?;
    if width == 0 || width % 2 != 0 {
        return Err(Error::InvalidSize(format!("strip width must be even and positive, got {width}")));
    }
    let active: Vec<bool> = (0..width as u64)
        .map(|x| uniform(seed, STREAM_SITE, x) < site_keep_p)
        .collect();
    let row = (0..width).map(|x| x % 2 == 0 && active[x]).collect();
    let mut cfg = OrientedConfig::new(row, theta, active)?;
    let mut rng = sim_rng(seed);
    let mut samples = vec![(0.0, cfg.count() as u64)];
    let extinction = loop {
        if cfg.count() == 0 {
            break ExtinctionTime { time: cfg.generation as f64, censored: false };
        }
        if cfg.generation >= max_generations {
            break ExtinctionTime { time: cfg.generation as f64, censored: true };
        }
        cfg.step(&mut rng);
        samples.push((cfg.generation as f64, cfg.count() as u64));
    };
    Ok(Trajectory {
        samples,
        extinction,
        seed,
        rate: theta,
        graph: format!("oriented({width},{site_keep_p})"),
    })
}
