//! Adaptive Gauss–Kronrod 7/15 quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Integral of `f` over `[a, b]`, bisecting the worst interval until the
/// summed error estimate is at most `rel_tol` times the magnitude of the
/// result (or below `1e-300`).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("interval [{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    loop {
        if !value.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand sum on [{a}, {b}]")));
        }
        if error <= rel_tol * value.abs() || error < 1e-300 {
            return Ok(Quadrature { value, error, intervals: heap.len() });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {} intervals: value {value}, error {error}",
                heap.len()
            )));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!(
                "interval around {mid} cannot be split further; error {error}"
            )));
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Log of `int_0^inf exp(log_f(x)) dx` for a unimodal integrand with peak
/// at `mode`. The integrand is rescaled by its peak value so that very small
/// results do not underflow; the range is cut where it falls below
/// `exp(-60)` of the peak.
pub fn log_integrate_half_line(
    log_f: impl Fn(f64) -> f64,
    mode: f64,
    rel_tol: f64,
) -> Result<(f64, Quadrature)> {
    const CUT: f64 = -60.0;
    let peak = log_f(mode);
    if !peak.is_finite() {
        return Err(Error::Quadrature(format!("integrand peak at {mode} is {peak}")));
    }
    let rel = |x: f64| log_f(x) - peak;
    let left = if mode <= 0.0 || rel(0.0) > CUT {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, mode);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rel(mid) < CUT {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let mut step = mode.abs().max(1.0);
    while rel(mode + step) > CUT {
        step *= 2.0;
        if !step.is_finite() {
            return Err(Error::Quadrature("integrand does not decay".into()));
        }
    }
    let g = |x: f64| rel(x).exp();
    let mut total = integrate(g, left, mode.max(0.0), rel_tol)?;
    let right = integrate(g, mode.max(0.0), mode + step, rel_tol)?;
    total.value += right.value;
    total.error += right.error;
    total.intervals += right.intervals;
    Ok((peak + total.value.ln(), total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        let q = integrate(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-9).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn half_line_gaussian() {
        let (l, _) = log_integrate_half_line(|x| -(x - 50.0) * (x - 50.0) / 2.0 - 1000.0, 50.0, 1e-10)
            .unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt().ln() - 1000.0;
        assert!((l - exact).abs() < 1e-9);
        let (l, _) = log_integrate_half_line(|x| -x, 0.0, 1e-10).unwrap();
        assert!(l.abs() < 1e-10);
    }

    #[test]
    fn divergent_fails() {
        assert!(integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-10).is_err());
    }
}
