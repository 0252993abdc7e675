//! Estimators for exponents and rates.

use serde::{Deserialize, Serialize};

use cpdilute::cpsim::ExtinctionTime;
use cpdilute::stats;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Abscissa range the fit was restricted to.
    pub window: (f64, f64),
    pub n_points: usize,
}

fn fit_transformed(
    points: &[(f64, f64)],
    window: (f64, f64),
    tx: impl Fn(f64) -> f64,
) -> Result<FitResult> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|&&(t, u)| t >= window.0 && t <= window.1 && u > 0.0)
        .map(|&(t, u)| (tx(t), u.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(HarnessError::InsufficientPoints {
            needed: 3,
            found: xs.len(),
            lo: window.0,
            hi: window.1,
        });
    }
    let f = stats::linear_fit(&xs, &ys);
    Ok(FitResult {
        slope: f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
        window,
        n_points: xs.len(),
    })
}

/// Least squares of `ln u` on `ln t` over points with `t` in `window` and
/// `u > 0`.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    if !(window.0 > 0.0) {
        return Err(HarnessError::Config(format!(
            "power-law window must start above 0, got {}",
            window.0
        )));
    }
    fit_transformed(points, window, f64::ln)
}

/// Least squares of `ln u` on `t`.
pub fn fit_exponential(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    fit_transformed(points, window, |t| t)
}

/// Median of replicate extinction times. Censored runs sort above every
/// finished one, so the median is censored exactly when at least half of the
/// runs are.
pub fn median_survival(times: &[ExtinctionTime]) -> ExtinctionTime {
    let mut v: Vec<ExtinctionTime> = times.to_vec();
    v.sort_by(|a, b| a.censored.cmp(&b.censored).then(a.time.total_cmp(&b.time)));
    let n = v.len();
    if n == 0 {
        return ExtinctionTime {
            time: f64::NAN,
            censored: false,
        };
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        ExtinctionTime {
            time: 0.5 * (a.time + b.time),
            censored: a.censored || b.censored,
        }
    }
}

/// Slope of `ln sigma_N` on `N`.
pub fn estimate_gamma2(sizes: &[usize], times: &[ExtinctionTime]) -> Result<FitResult> {
    estimate_log_rate(&sizes.iter().map(|&n| n as f64).collect::<Vec<_>>(), sizes, times)
}

/// Slope of `ln sigma` on an arbitrary size measure `x` (for example
/// `N / ln N`); `sizes` only label censored entries in the error.
pub fn estimate_log_rate(x: &[f64], sizes: &[usize], times: &[ExtinctionTime]) -> Result<FitResult> {
    if x.len() != times.len() || sizes.len() != times.len() {
        return Err(HarnessError::Config(format!(
            "{} sizes for {} survival times",
            x.len(),
            times.len()
        )));
    }
    let censored: Vec<usize> = sizes
        .iter()
        .zip(times)
        .filter(|(_, t)| t.censored)
        .map(|(&n, _)| n)
        .collect();
    if !censored.is_empty() {
        return Err(HarnessError::Censored(censored));
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let points: Vec<(f64, f64)> = x.iter().zip(times).map(|(&n, t)| (n, t.time)).collect();
    fit_exponential(&points, (lo, hi))
}
