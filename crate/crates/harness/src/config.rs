//! Declarative experiment configuration (JSON, unknown keys rejected).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cpdilute::graphgen::DilutionMode;

use crate::error::{io_err, HarnessError, Result};
use crate::experiments::EXPERIMENTS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Path1d,
    Lattice2d,
    ErdosRenyi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub family: Family,
    /// Vertex count for paths and Erdős–Rényi graphs, side length for
    /// lattices.
    pub sizes: Vec<usize>,
    /// Mean degree of the undiluted Erdős–Rényi graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilutionSpec {
    pub mode: DilutionMode,
    pub p: Vec<f64>,
}

/// Sample times `t0 * ratio^i` for `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub t0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t0: 0.1,
            ratio: 1.3,
            count: 40,
        }
    }
}

impl Schedule {
    pub fn times(&self) -> Vec<f64> {
        let mut t = self.t0;
        (0..self.count)
            .map(|_| {
                let out = t;
                t *= self.ratio;
                out
            })
            .collect()
    }

    /// Smallest schedule reaching `t_max` from `t0` at `ratio`.
    pub fn covering(t0: f64, ratio: f64, t_max: f64) -> Schedule {
        let count = ((t_max / t0).ln() / ratio.ln()).floor() as usize + 1;
        Schedule { t0, ratio, count }
    }
}

/// Constants that would otherwise be estimated during the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    /// Arrhenius rate of cluster survival times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_rate: Option<f64>,
    /// Strip path-length constant for lattices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub graph: GraphSpec,
    pub dilution: DilutionSpec,
    pub lambda: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub t_max: f64,
    #[serde(default)]
    pub schedule: Schedule,
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
    /// Abscissa range for the primary fit; experiments pick their own
    /// default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<(f64, f64)>,
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(HarnessError::UnknownExperiment(self.experiment.clone()));
        }
        if self.graph.sizes.is_empty() {
            return Err(bad("graph.sizes is empty"));
        }
        if self.graph.sizes.contains(&0) {
            return Err(bad("graph.sizes contains 0"));
        }
        if self.dilution.p.is_empty() {
            return Err(bad("dilution.p is empty"));
        }
        if let Some(p) = self.dilution.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(bad(format!("dilution probability {p} outside [0, 1]")));
        }
        if self.lambda.is_empty() {
            return Err(bad("lambda is empty"));
        }
        if let Some(l) = self.lambda.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(bad(format!("lambda {l} must be positive")));
        }
        if self.replicates == 0 {
            return Err(bad("replicates must be positive"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(bad(format!("t_max {} must be positive", self.t_max)));
        }
        let s = &self.schedule;
        if s.count == 0 || !(s.t0 > 0.0) || !(s.ratio > 1.0) || !s.t0.is_finite() {
            return Err(bad(format!(
                "schedule needs t0 > 0, ratio > 1 and count > 0; got {s:?}"
            )));
        }
        if self.graph.family == Family::ErdosRenyi {
            match self.graph.mu {
                Some(mu) if mu.is_finite() && mu > 0.0 => {}
                _ => return Err(bad("erdos_renyi graphs need a positive graph.mu")),
            }
        }
        if let Some((lo, hi)) = self.fit_window {
            if !(lo < hi) {
                return Err(bad(format!("fit_window ({lo}, {hi}) is empty")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    /// Desk-scale defaults for each named experiment.
    pub fn preset(name: &str) -> Result<Self> {
        let base = |family, sizes: Vec<usize>, mode, p: Vec<f64>| ExperimentConfig {
            experiment: name.to_string(),
            graph: GraphSpec {
                family,
                sizes,
                mu: None,
            },
            dilution: DilutionSpec { mode, p },
            lambda: vec![2.0],
            replicates: 50,
            seed: 1,
            t_max: 3000.0,
            schedule: Schedule::default(),
            output: PathBuf::from(format!("out/{name}")),
            constants: None,
            fit_window: None,
        };
        use DilutionMode::{Bond, Site};
        use Family::*;
        let cfg = match name {
            "griffiths-1d" => base(Path1d, vec![10_000], Site, vec![0.7]),
            "griffiths-er" => {
                let mut c = base(ErdosRenyi, vec![10_000], Bond, vec![0.25]);
                c.graph.mu = Some(3.0);
                c
            }
            "griffiths-2d" => {
                let mut c = base(Lattice2d, vec![50], Bond, vec![0.4]);
                c.t_max = 1000.0;
                c
            }
            "supercrit-er" => {
                let mut c = base(ErdosRenyi, vec![10, 13, 16, 19], Bond, vec![0.75]);
                c.graph.mu = Some(3.0);
                c.replicates = 40;
                c.t_max = 1e6;
                c
            }
            "supercrit-2d" => {
                let mut c = base(Lattice2d, vec![2, 3, 4, 5], Bond, vec![0.6]);
                c.lambda = vec![1.8];
                c.replicates = 100;
                c.t_max = 1e6;
                c
            }
            "critical-line-er" => {
                let mut c = base(ErdosRenyi, vec![1000, 3000, 10_000, 30_000], Bond, vec![1.0 / 3.0]);
                c.graph.mu = Some(3.0);
                c.replicates = 20;
                c
            }
            "critical-line-2d" => {
                let mut c = base(Lattice2d, vec![32, 64, 128], Bond, vec![0.5]);
                c.replicates = 20;
                c
            }
            "arrhenius" => {
                let mut c = base(Path1d, (2..=10).collect(), Bond, vec![1.0]);
                c.replicates = 1;
                c
            }
            "phase-scan" => {
                let mut c = base(ErdosRenyi, vec![2000], Bond, vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0]);
                c.graph.mu = Some(3.0);
                c.lambda = vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
                c.replicates = 10;
                c.t_max = 200.0;
                c.schedule = Schedule::covering(0.1, 1.3, 200.0);
                c
            }
            other => return Err(HarnessError::UnknownExperiment(other.to_string())),
        };
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in EXPERIMENTS {
            let cfg = ExperimentConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back, cfg, "{name}");
        }
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut v = serde_json::to_value(ExperimentConfig::preset("arrhenius").unwrap()).unwrap();
        v["replicats"] = 3.into();
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        let mut v = serde_json::to_value(ExperimentConfig::preset("arrhenius").unwrap()).unwrap();
        v["schedule"]["step"] = 3.into();
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn validation_failures() {
        let good = ExperimentConfig::preset("griffiths-1d").unwrap();
        let mut c = good.clone();
        c.lambda.clear();
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.dilution.p = vec![1.5];
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.schedule.ratio = 1.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.experiment = "griffiths-3d".into();
        assert!(matches!(c.validate(), Err(HarnessError::UnknownExperiment(_))));
        let mut c = good;
        c.graph.family = Family::ErdosRenyi;
        assert!(c.validate().is_err());
    }

    #[test]
    fn schedule_times() {
        let s = Schedule::default();
        let t = s.times();
        assert_eq!(t.len(), 40);
        assert_eq!(t[0], 0.1);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        let c = Schedule::covering(0.1, 1.3, 3000.0);
        let t = c.times();
        assert!(*t.last().unwrap() <= 3000.0);
        assert!(t.last().unwrap() * 1.3 > 3000.0);
    }
}
