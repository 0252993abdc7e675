//! Closed forms and integral asymptotics for the diluted contact process.
//!
//! Conventions: `nu` is the mean degree after dilution, `alpha(nu) = nu - 1
//! - ln nu`, `A` is the exponential growth rate of the survival time of a
//! finite cluster in its size, and `gamma2` is the exponential survival rate
//! of the undiluted one-dimensional process.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod quadrature;

pub use quadrature::{integrate, log_integrate_half_line, Quadrature};

const REL_TOL: f64 = 1e-8;

pub fn alpha_nu(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("alpha(nu) needs nu > 0, got {nu}")));
    }
    Ok(nu - 1.0 - nu.ln())
}

fn check_subcritical(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Domain(format!("formula holds for 0 < nu < 1, got {nu}")));
    }
    alpha_nu(nu)
}

/// `ln` of the asymptotic subcritical cluster-size law
/// `s^{-3/2} exp(-s alpha(nu)) / (nu sqrt(2 pi))`.
pub fn log_cluster_pmf(s: u64, nu: f64) -> Result<f64> {
    let alpha = check_subcritical(nu)?;
    if s == 0 {
        return Err(Error::Domain("cluster size must be at least 1".into()));
    }
    let s = s as f64;
    Ok(-(nu * (2.0 * PI).sqrt()).ln() - 1.5 * s.ln() - s * alpha)
}

/// Asymptotic cluster-size law. It is not normalized.
pub fn cluster_pmf(s: u64, nu: f64) -> Result<f64> {
    Ok(log_cluster_pmf(s, nu)?.exp())
}

/// Noest's density `int_0^inf x exp(-b x - t exp(-a x)) dx`.
pub fn noest_u_integral(t: f64, a: f64, b: f64) -> Result<f64> {
    Ok(log_noest_u_integral(t, a, b)?.exp())
}

pub fn log_noest_u_integral(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("need a, b > 0 and finite t >= 0; got a={a} b={b} t={t}")));
    }
    let log_f = |x: f64| x.ln() - b * x - t * (-a * x).exp();
    // the log integrand is concave; its slope 1/x - b + a t e^{-ax} is decreasing
    let slope = |x: f64| 1.0 / x - b + a * t * (-a * x).exp();
    let mut hi = 1.0 / b + (a * t / b).max(1.0).ln() / a + 1.0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(log_integrate_half_line(log_f, 0.5 * (lo + hi), REL_TOL)?.0)
}

/// Laplace evaluation of the Noest integral around `x* = ln(a t / b) / a`:
/// `e^{-b/a} (a t / b)^{-b/a} x* sqrt(2 pi / (a b))`.
pub fn noest_u_asymptotic(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("need a, b > 0; got a={a} b={b}")));
    }
    let z = a * t / b;
    if !(z > 1.0) {
        return Err(Error::Regime(format!("Laplace form needs a t / b > 1, got {z}")));
    }
    let c = b / a;
    let x_star = z.ln() / a;
    Ok((-c).exp() * z.powf(-c) * x_star * (2.0 * PI / (a * b)).sqrt())
}

/// Peak location `x* = ln(a t / b) / a` of the Noest integrand's exponent.
pub fn noest_x_star(t: f64, a: f64, b: f64) -> Result<f64> {
    let z = a * t / b;
    if !(a > 0.0 && b > 0.0 && z > 0.0) {
        return Err(Error::Domain(format!("need a, b, t > 0; got a={a} b={b} t={t}")));
    }
    Ok(z.ln() / a)
}

/// Saddle-point decay on a subcritical Erdős–Rényi graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErSaddle {
    /// `t^{-theta}`.
    pub u: f64,
    /// `alpha(nu) / A`.
    pub theta: f64,
    /// Dominant cluster size `ln t / A`.
    pub s0: f64,
}

pub fn er_u_saddle(t: f64, nu: f64, a_rate: f64) -> Result<ErSaddle> {
    let alpha = check_subcritical(nu)?;
    if !(a_rate > 0.0) {
        return Err(Error::Domain(format!("A must be positive, got {a_rate}")));
    }
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("saddle form needs t >= 1, got {t}")));
    }
    let theta = alpha / a_rate;
    Ok(ErSaddle {
        u: t.powf(-theta),
        theta,
        s0: t.ln() / a_rate,
    })
}

/// `ln` of `int_0^inf s^{-1/2} e^{-s alpha} exp(-t e^{-A s}) ds / (sqrt(2 pi) nu)`,
/// integrated in `w = sqrt(s)`.
pub fn log_er_u_quadrature(t: f64, nu: f64, a_rate: f64) -> Result<f64> {
    let alpha = check_subcritical(nu)?;
    if !(a_rate > 0.0 && t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("need A > 0 and finite t >= 0; got A={a_rate} t={t}")));
    }
    let log_f = |w: f64| -alpha * w * w - t * (-a_rate * w * w).exp();
    let ratio = a_rate * t / alpha;
    let mode = if ratio > 1.0 { (ratio.ln() / a_rate).sqrt() } else { 0.0 };
    let (log_i, _) = log_integrate_half_line(log_f, mode, REL_TOL)?;
    Ok(log_i + 2f64.ln() - (nu * (2.0 * PI).sqrt()).ln())
}

pub fn er_u_quadrature(t: f64, nu: f64, a_rate: f64) -> Result<f64> {
    Ok(log_er_u_quadrature(t, nu, a_rate)?.exp())
}

/// `(ln N - (5/2) ln ln N) / alpha(nu)`.
pub fn largest_cluster_asymptotic(n: f64, nu: f64) -> Result<f64> {
    let alpha = check_subcritical(nu)?;
    if !(n >= 16.0) {
        return Err(Error::Domain(format!("need N >= 16, got {n}")));
    }
    Ok((n.ln() - 2.5 * n.ln().ln()) / alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "griffiths_1d")]
    Griffiths1d,
    #[serde(rename = "griffiths_er")]
    GriffithsEr,
    #[serde(rename = "griffiths_2d")]
    Griffiths2d,
    #[serde(rename = "supercrit_er")]
    SupercritEr,
    #[serde(rename = "supercrit_2d")]
    Supercrit2d,
    #[serde(rename = "critical_er")]
    CriticalEr,
    #[serde(rename = "critical_2d")]
    Critical2d,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::Griffiths1d,
        Regime::GriffithsEr,
        Regime::Griffiths2d,
        Regime::SupercritEr,
        Regime::Supercrit2d,
        Regime::CriticalEr,
        Regime::Critical2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Griffiths1d => "griffiths_1d",
            Regime::GriffithsEr => "griffiths_er",
            Regime::Griffiths2d => "griffiths_2d",
            Regime::SupercritEr => "supercrit_er",
            Regime::Supercrit2d => "supercrit_2d",
            Regime::CriticalEr => "critical_er",
            Regime::Critical2d => "critical_2d",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        Regime::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// Inputs to [`scaling_predictions`]; each regime reads only what it needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub p: Option<f64>,
    pub nu: Option<f64>,
    pub gamma2: Option<f64>,
    /// Path-length constant of the 2D strip construction.
    pub eta2: Option<f64>,
    /// Linear path-length constant on supercritical Erdős–Rényi graphs.
    pub eta_er: Option<f64>,
}

/// Growth law of the survival time in the system size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictionForm {
    /// `N^exponent`.
    PowerLaw { exponent: f64 },
    /// `exp(rate N^exponent (ln N)^log_power)`; `rate` is absent when only
    /// the shape is known.
    Stretched {
        rate: Option<f64>,
        exponent: f64,
        log_power: f64,
    },
    /// `exp(rate N)`.
    ExpLinear { rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub regime: Regime,
    pub form: PredictionForm,
    pub constants: BTreeMap<String, f64>,
    pub formula_text: String,
}

impl AsymptoticPrediction {
    /// Exponent of the density decay `u(t) ~ t^{-1/exponent}` implied by a
    /// power-law survival time, if this is one.
    pub fn density_decay_exponent(&self) -> Option<f64> {
        match self.form {
            PredictionForm::PowerLaw { exponent } => Some(1.0 / exponent),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("prediction serializes")
    }
}

fn need(value: Option<f64>, name: &'static str) -> Result<f64> {
    value.ok_or(Error::MissingConstant(name))
}

/// Lower-bound growth law of the survival time from all occupied.
pub fn scaling_predictions(regime: Regime, params: &ScalingParams) -> Result<AsymptoticPrediction> {
    let mut constants = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        constants.insert(k.to_string(), v);
    };
    let (form, text) = match regime {
        Regime::Griffiths1d => {
            let p = need(params.p, "p")?;
            let g = need(params.gamma2, "gamma2")?;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("griffiths_1d needs 0 < p < 1, got {p}")));
            }
            let kappa = g / (1.0 / p).ln();
            put("p", p);
            put("gamma2", g);
            put("kappa", kappa);
            (PredictionForm::PowerLaw { exponent: kappa }, "sigma_N >= N^(gamma2 / ln(1/p))")
        }
        Regime::GriffithsEr => {
            let nu = need(params.nu, "nu")?;
            let g = need(params.gamma2, "gamma2")?;
            check_subcritical(nu)?;
            let kappa = g / (1.0 / nu).ln();
            put("nu", nu);
            put("gamma2", g);
            put("kappa", kappa);
            (PredictionForm::PowerLaw { exponent: kappa }, "sigma_N >= N^(gamma2 / ln(1/nu))")
        }
        Regime::Griffiths2d => {
            let g = need(params.gamma2, "gamma2")?;
            let eta = need(params.eta2, "eta2")?;
            put("gamma2", g);
            put("eta2", eta);
            put("kappa", eta * g);
            (PredictionForm::PowerLaw { exponent: eta * g }, "sigma_N >= N^(eta2(p) gamma2)")
        }
        Regime::SupercritEr => {
            let g = need(params.gamma2, "gamma2")?;
            let eta = need(params.eta_er, "eta_er")?;
            put("gamma2", g);
            put("eta_er", eta);
            (PredictionForm::ExpLinear { rate: g * eta }, "sigma_N >= exp(gamma2 eta_ER(nu) N)")
        }
        Regime::Supercrit2d => {
            let g = need(params.gamma2, "gamma2")?;
            let eta = need(params.eta2, "eta2")?;
            put("gamma2", g);
            put("eta2", eta);
            (
                PredictionForm::Stretched {
                    rate: Some(g * eta),
                    exponent: 1.0,
                    log_power: -1.0,
                },
                "sigma_N >= exp(gamma2 eta2(p) N / ln N)",
            )
        }
        Regime::CriticalEr | Regime::Critical2d => {
            let exponent = if regime == Regime::CriticalEr { 1.0 / 3.0 } else { 0.5 };
            put("path_exponent", exponent);
            if let Some(g) = params.gamma2 {
                put("gamma2", g);
            }
            (
                PredictionForm::Stretched {
                    rate: params.gamma2,
                    exponent,
                    log_power: 0.0,
                },
                if regime == Regime::CriticalEr {
                    "sigma_N >= exp(c N^(1/3)); u(t) = 1/N at t = exp(N^(1/3))"
                } else {
                    "sigma_N >= exp(c N^(1/2)); u(t) = 1/N at t = exp(N^(1/2))"
                },
            )
        }
    };
    Ok(AsymptoticPrediction {
        regime,
        form,
        constants,
        formula_text: text.to_string(),
    })
}
