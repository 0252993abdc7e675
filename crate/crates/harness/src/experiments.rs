//! Named experiments: replicate fan-out, CSV emission and summaries.
//!
//! Replicate `i` of every parameter combination uses seed `base + i` for the
//! random graph, the dilution mask and the dynamics, so masks at different
//! keep probabilities are nested and results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cpdilute::cpsim::{self, ExtinctionTime, Trajectory};
use cpdilute::graphgen::{
    dilute_bonds, dilute_sites, gen_erdos_renyi, gen_lattice2d, gen_path, DilutedGraph, DilutionMode, Graph,
};
use cpdilute::oracle::{exact_mean_extinction, OracleTable};
use cpdilute::percolate::{self, crossing_path, longest_path_dfs, staircase_long_path, Orientation, Rect};
use cpdilute::stats;
use cpdilute::theory::{self, scaling_predictions, AsymptoticPrediction, Regime, ScalingParams};

use crate::config::{ExperimentConfig, Family};
use crate::error::{io_err, HarnessError, Result};
use crate::fit::{self, FitResult};

pub const EXPERIMENTS: [&str; 9] = [
    "griffiths-1d",
    "griffiths-er",
    "griffiths-2d",
    "supercrit-er",
    "supercrit-2d",
    "critical-line-er",
    "critical-line-2d",
    "arrhenius",
    "phase-scan",
];

pub const SCHEMA_VERSION: u32 = 1;

/// Path sizes and replicate count used when `gamma2` must be estimated.
pub const GAMMA2_SIZES: [usize; 4] = [15, 20, 25, 30];
pub const GAMMA2_REPLICATES: usize = 200;
const GAMMA2_T_MAX: f64 = 1e8;

/// Undiluted runs in the supercritical contrast of the Griffiths experiments.
const CONTRAST_REPLICATES: usize = 4;
const DFS_RESTARTS: usize = 20;

/// One fitted or measured quantity, next to its theory value when one
/// exists. `ratio` is `fitted / prediction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub fitted: f64,
    pub prediction: Option<f64>,
    pub ratio: Option<f64>,
    pub fit: Option<FitResult>,
    pub theory: Option<AsymptoticPrediction>,
}

impl Estimate {
    fn new(name: &str, params: &[(&str, f64)], fitted: f64) -> Self {
        Estimate {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            fitted,
            prediction: None,
            ratio: None,
            fit: None,
            theory: None,
        }
    }

    fn with_fit(mut self, fit: FitResult) -> Self {
        self.fit = Some(fit);
        self
    }

    fn predicted(mut self, prediction: f64, theory: Option<AsymptoticPrediction>) -> Self {
        self.prediction = Some(prediction);
        self.ratio = Some(self.fitted / prediction);
        self.theory = theory;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub estimates: Vec<Estimate>,
    /// Predictions that could not be formed, and other remarks.
    pub notes: Vec<String>,
}

impl Summary {
    /// First estimate called `name`.
    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }
}

/// Survival-time rate of undiluted paths: median extinction time over
/// `reps` runs per size, then the slope of its log against the size.
#[derive(Clone, Debug, PartialEq)]
pub struct Gamma2Estimate {
    pub fit: FitResult,
    pub sizes: Vec<usize>,
    pub medians: Vec<ExtinctionTime>,
}

pub fn estimate_gamma2_paths(
    lambda: f64,
    sizes: &[usize],
    reps: usize,
    t_max: f64,
    seed: u64,
) -> Result<Gamma2Estimate> {
    let medians = sizes
        .iter()
        .map(|&n| {
            let dg = DilutedGraph::undiluted(Arc::new(gen_path(n)?));
            Ok(fit::median_survival(&cpsim::survival_times(&dg, lambda, reps, t_max, seed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit::estimate_gamma2(sizes, &medians)?;
    Ok(Gamma2Estimate {
        fit,
        sizes: sizes.to_vec(),
        medians,
    })
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: PathBuf,
    estimates: Vec<Estimate>,
    notes: Vec<String>,
    gamma2: BTreeMap<u64, f64>,
}

impl<'a> Ctx<'a> {
    fn create(&self, rel: impl AsRef<FsPath>) -> Result<BufWriter<File>> {
        let path = self.out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        Ok(BufWriter::new(File::create(&path).map_err(io_err(&path))?))
    }

    fn write(&self, rel: impl AsRef<FsPath>, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let rel = rel.as_ref();
        let mut w = self.create(rel)?;
        f(&mut w).and_then(|_| w.flush()).map_err(io_err(self.out.join(rel)))
    }

    fn seed(&self, i: usize) -> u64 {
        self.cfg.seed.wrapping_add(i as u64)
    }

    /// Supplied `gamma2`, or one estimated from undiluted paths at `lambda`
    /// (cached per `lambda`).
    fn gamma2(&mut self, lambda: f64) -> Result<f64> {
        if let Some(g) = self.cfg.constants.and_then(|c| c.gamma2) {
            return Ok(g);
        }
        if let Some(&g) = self.gamma2.get(&lambda.to_bits()) {
            return Ok(g);
        }
        let est = estimate_gamma2_paths(lambda, &GAMMA2_SIZES, GAMMA2_REPLICATES, GAMMA2_T_MAX, self.cfg.seed)?;
        self.write(format!("gamma2_lambda{lambda}.csv"), |w| {
            writeln!(w, "size,median_extinction_time,censored")?;
            for (n, m) in est.sizes.iter().zip(&est.medians) {
                writeln!(w, "{n},{},{}", m.time, m.censored)?;
            }
            Ok(())
        })?;
        let g = est.fit.slope;
        self.estimates
            .push(Estimate::new("gamma2", &[("lambda", lambda)], g).with_fit(est.fit));
        self.gamma2.insert(lambda.to_bits(), g);
        Ok(g)
    }
}

fn base_graph(cfg: &ExperimentConfig, size: usize, seed: u64) -> Result<Graph> {
    Ok(match cfg.graph.family {
        Family::Path1d => gen_path(size)?,
        Family::Lattice2d => gen_lattice2d(size)?,
        Family::ErdosRenyi => gen_erdos_renyi(size, cfg.graph.mu.unwrap_or(0.0), seed)?,
    })
}

/// Vertex count of the graph built from `size`.
fn n_vertices(family: Family, size: usize) -> usize {
    match family {
        Family::Lattice2d => size * size,
        _ => size,
    }
}

fn dilute(mode: DilutionMode, g: Arc<Graph>, p: f64, seed: u64) -> Result<DilutedGraph> {
    Ok(match mode {
        DilutionMode::Bond => dilute_bonds(g, p, seed)?,
        DilutionMode::Site => dilute_sites(g, p, seed)?,
    })
}

/// Replicate configuration `i` at keep probability `p`. Deterministic
/// families share one base graph across replicates.
fn replicate_graph(cfg: &ExperimentConfig, shared: &Option<Arc<Graph>>, size: usize, p: f64, seed: u64) -> Result<DilutedGraph> {
    let g = match shared {
        Some(g) => g.clone(),
        None => Arc::new(base_graph(cfg, size, seed)?),
    };
    dilute(cfg.dilution.mode, g, p, seed)
}

fn shared_graph(cfg: &ExperimentConfig, size: usize) -> Result<Option<Arc<Graph>>> {
    Ok(match cfg.graph.family {
        Family::ErdosRenyi => None,
        _ => Some(Arc::new(base_graph(cfg, size, cfg.seed)?)),
    })
}

/// Runs the configured experiment, writing per-replicate CSVs,
/// `aggregate.csv` and `summary.json` under `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Summary> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output).map_err(io_err(&cfg.output))?;
    let mut ctx = Ctx {
        cfg,
        out: cfg.output.clone(),
        estimates: Vec::new(),
        notes: Vec::new(),
        gamma2: BTreeMap::new(),
    };
    match cfg.experiment.as_str() {
        "griffiths-1d" => griffiths(&mut ctx, Regime::Griffiths1d)?,
        "griffiths-er" => griffiths(&mut ctx, Regime::GriffithsEr)?,
        "griffiths-2d" => griffiths(&mut ctx, Regime::Griffiths2d)?,
        "supercrit-er" => supercritical(&mut ctx, Regime::SupercritEr)?,
        "supercrit-2d" => supercritical(&mut ctx, Regime::Supercrit2d)?,
        "critical-line-er" => critical_er(&mut ctx)?,
        "critical-line-2d" => critical_2d(&mut ctx)?,
        "arrhenius" => arrhenius(&mut ctx)?,
        "phase-scan" => phase_scan(&mut ctx)?,
        other => return Err(HarnessError::UnknownExperiment(other.to_string())),
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        experiment: cfg.experiment.clone(),
        config: cfg.clone(),
        estimates: ctx.estimates,
        notes: ctx.notes,
    };
    let path = cfg.output.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n").map_err(io_err(&path))?;
    Ok(summary)
}

fn family_tag(cfg: &ExperimentConfig) -> &'static str {
    match cfg.graph.family {
        Family::Path1d => "path",
        Family::Lattice2d => "lattice",
        Family::ErdosRenyi => "er",
    }
}

fn griffiths(ctx: &mut Ctx, regime: Regime) -> Result<()> {
    let cfg = ctx.cfg;
    let times: Vec<f64> = cfg.schedule.times().into_iter().filter(|&t| t <= cfg.t_max).collect();
    let mut agg = Vec::new();
    for &size in &cfg.graph.sizes {
        let shared = shared_graph(cfg, size)?;
        let n = n_vertices(cfg.graph.family, size);
        for &p in &cfg.dilution.p {
            for &lambda in &cfg.lambda {
                let trajs: Vec<Trajectory> = (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let seed = ctx.seed(i);
                        let dg = replicate_graph(cfg, &shared, size, p, seed)?;
                        Ok(cpsim::run_contact(&dg, lambda, cfg.t_max, &times, seed)?)
                    })
                    .collect::<Result<_>>()?;
                let dir = format!("replicates/{}{size}_p{p}_lambda{lambda}", family_tag(cfg));
                for (i, tr) in trajs.iter().enumerate() {
                    ctx.write(format!("{dir}/rep{i:04}.csv"), |w| tr.write_csv(w))?;
                }
                let u = cpsim::mean_density(&trajs, &times, n)?;
                for (k, &t) in times.iter().enumerate() {
                    let alive = trajs.iter().filter(|tr| tr.count_at(t).unwrap_or(0) > 0).count();
                    agg.push(format!(
                        "{size},{p},{lambda},{t},{},{}",
                        u[k],
                        alive as f64 / trajs.len() as f64
                    ));
                }
                let points: Vec<(f64, f64)> = times.iter().copied().zip(u.iter().copied()).collect();
                let params = [("size", size as f64), ("p", p), ("lambda", lambda)];
                // default: the decade ending at half the last time with u > 0
                let window = cfg.fit_window.unwrap_or_else(|| {
                    let last = points.iter().rev().find(|p| p.1 > 0.0).map_or(cfg.t_max, |p| p.0);
                    (last / 20.0, last / 2.0)
                });
                let lower = (window.0 / 10.0, window.1 / 10.0);
                let primary = match fit::fit_power_law(&points, window) {
                    Ok(f) => f,
                    Err(e) => {
                        ctx.notes.push(format!("density fit at {params:?}: {e}"));
                        continue;
                    }
                };
                let mut est = Estimate::new("density_decay_exponent", &params, -primary.slope).with_fit(primary);
                match fit::fit_power_law(&points, lower) {
                    Ok(f) => ctx
                        .estimates
                        .push(Estimate::new("density_decay_exponent_lower_decade", &params, -f.slope).with_fit(f)),
                    Err(e) => ctx.notes.push(format!("lower-decade fit at {params:?}: {e}")),
                }

                let g = ctx.gamma2(lambda)?;
                let sp = match regime {
                    Regime::Griffiths1d => ScalingParams {
                        p: Some(p),
                        gamma2: Some(g),
                        ..Default::default()
                    },
                    Regime::GriffithsEr => ScalingParams {
                        nu: cfg.graph.mu.map(|mu| mu * p),
                        gamma2: Some(g),
                        ..Default::default()
                    },
                    _ => ScalingParams {
                        gamma2: Some(g),
                        eta2: cfg.constants.and_then(|c| c.eta2),
                        ..Default::default()
                    },
                };
                match scaling_predictions(regime, &sp) {
                    Ok(pred) => {
                        let d = pred.density_decay_exponent().expect("griffiths forms are power laws");
                        est = est.predicted(d, Some(pred));
                    }
                    Err(e) => ctx.notes.push(format!("no {} prediction at {params:?}: {e}", regime.name())),
                }
                ctx.estimates.push(est);

                if regime == Regime::GriffithsEr {
                    if let (Some(a), Some(mu)) = (cfg.constants.and_then(|c| c.a_rate), cfg.graph.mu) {
                        let nu = mu * p;
                        match theory::alpha_nu(nu) {
                            Ok(alpha) if nu < 1.0 => ctx.estimates.push(
                                Estimate::new("density_decay_exponent_saddle", &params, -primary.slope)
                                    .with_fit(primary)
                                    .predicted(alpha / a, None),
                            ),
                            _ => ctx.notes.push(format!("no saddle exponent at nu={nu}")),
                        }
                    }
                }

                let contrast: Vec<ExtinctionTime> = (0..CONTRAST_REPLICATES.min(cfg.replicates))
                    .into_par_iter()
                    .map(|i| {
                        let seed = ctx.seed(i);
                        let g = match &shared {
                            Some(g) => g.clone(),
                            None => Arc::new(base_graph(cfg, size, seed)?),
                        };
                        Ok(cpsim::extinction_time(&DilutedGraph::undiluted(g), lambda, cfg.t_max, seed)?)
                    })
                    .collect::<Result<_>>()?;
                let survived = contrast.iter().filter(|e| e.censored).count();
                ctx.write(format!("{dir}/undiluted_extinction.csv"), |w| {
                    cpsim::write_extinction_csv(&contrast, w)
                })?;
                ctx.estimates.push(Estimate::new(
                    "undiluted_survival_fraction",
                    &params,
                    survived as f64 / contrast.len() as f64,
                ));
            }
        }
    }
    ctx.write("aggregate.csv", |w| {
        writeln!(w, "size,p,lambda,time,mean_density,surviving_fraction")?;
        agg.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}

/// Path-length constant on a lattice side `side`: best staircase length
/// times `ln N / N`, over a few strip heights.
fn estimate_eta2(p: f64, side: usize, seed: u64) -> Result<Option<f64>> {
    let dg = dilute_bonds(Arc::new(gen_lattice2d(side)?), p, seed)?;
    let mut best = 0usize;
    for c in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0] {
        if c * (side as f64).ln() < 1.0 {
            continue;
        }
        if let Some(path) = staircase_long_path(&dg, c)? {
            best = best.max(path.length());
        }
    }
    let n = (side * side) as f64;
    Ok((best > 0).then(|| best as f64 * n.ln() / n))
}

/// Linear path-length constant: DFS longest path over `N`.
fn estimate_eta_er(mu: f64, p: f64, n: usize, seeds: usize, base_seed: u64) -> Result<f64> {
    let lengths = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i as u64);
            let dg = dilute_bonds(Arc::new(gen_erdos_renyi(n, mu, seed)?), p, seed)?;
            Ok(longest_path_dfs(&dg, DFS_RESTARTS, seed).length() as f64 / n as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(stats::mean(&lengths))
}

fn supercritical(ctx: &mut Ctx, regime: Regime) -> Result<()> {
    let cfg = ctx.cfg;
    let mut agg = Vec::new();
    for &p in &cfg.dilution.p {
        for &lambda in &cfg.lambda {
            let mut medians = Vec::new();
            for &size in &cfg.graph.sizes {
                let shared = shared_graph(cfg, size)?;
                let times: Vec<ExtinctionTime> = (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let seed = ctx.seed(i);
                        let dg = replicate_graph(cfg, &shared, size, p, seed)?;
                        Ok(cpsim::extinction_time(&dg, lambda, cfg.t_max, seed)?)
                    })
                    .collect::<Result<_>>()?;
                ctx.write(
                    format!("replicates/{}{size}_p{p}_lambda{lambda}.csv", family_tag(cfg)),
                    |w| cpsim::write_extinction_csv(&times, w),
                )?;
                let m = fit::median_survival(&times);
                agg.push(format!("{size},{p},{lambda},{},{}", m.time, m.censored));
                medians.push(m);
            }
            let sizes = &cfg.graph.sizes;
            let params = [("p", p), ("lambda", lambda)];
            let x: Vec<f64> = match regime {
                Regime::Supercrit2d => sizes
                    .iter()
                    .map(|&l| {
                        let n = (l * l) as f64;
                        n / n.ln()
                    })
                    .collect(),
                _ => sizes.iter().map(|&n| n as f64).collect(),
            };
            let f = match fit::estimate_log_rate(&x, sizes, &medians) {
                Ok(f) => f,
                Err(e @ HarnessError::Censored(_)) => {
                    ctx.notes.push(format!("survival rate at {params:?}: {e}"));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut est = Estimate::new("survival_rate", &params, f.slope).with_fit(f);
            let g = ctx.gamma2(lambda)?;
            let sp = match regime {
                Regime::SupercritEr => {
                    let mu = cfg.graph.mu.expect("validated");
                    let eta = estimate_eta_er(mu, p, 10_000, 5, cfg.seed)?;
                    ctx.estimates.push(Estimate::new("eta_er", &params, eta));
                    ScalingParams {
                        gamma2: Some(g),
                        eta_er: Some(eta),
                        ..Default::default()
                    }
                }
                _ => {
                    let eta = match cfg.constants.and_then(|c| c.eta2) {
                        Some(e) => Some(e),
                        None => {
                            let e = estimate_eta2(p, 128, cfg.seed)?;
                            if let Some(e) = e {
                                ctx.estimates.push(Estimate::new("eta2", &params, e));
                            }
                            e
                        }
                    };
                    ScalingParams {
                        gamma2: Some(g),
                        eta2: eta,
                        ..Default::default()
                    }
                }
            };
            match scaling_predictions(regime, &sp) {
                Ok(pred) => {
                    let rate = match pred.form {
                        theory::PredictionForm::ExpLinear { rate } => Some(rate),
                        theory::PredictionForm::Stretched { rate, .. } => rate,
                        _ => None,
                    };
                    if let Some(r) = rate {
                        est = est.predicted(r, Some(pred));
                    }
                }
                Err(e) => ctx.notes.push(format!("no {} prediction at {params:?}: {e}", regime.name())),
            }
            ctx.estimates.push(est);
        }
    }
    ctx.write("aggregate.csv", |w| {
        writeln!(w, "size,p,lambda,median_extinction_time,censored")?;
        agg.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}

fn log_log_exponent(ctx: &mut Ctx, name: &str, params: &[(&str, f64)], xs: &[f64], ys: &[f64], regime: Regime) -> Result<()> {
    let points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f = fit::fit_power_law(&points, (lo, hi))?;
    let pred = scaling_predictions(regime, &ScalingParams::default())?;
    let target = pred.constants["path_exponent"];
    ctx.estimates
        .push(Estimate::new(name, params, f.slope).with_fit(f).predicted(target, Some(pred)));
    Ok(())
}

fn critical_er(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let mu = cfg.graph.mu.expect("validated");
    let mut agg = Vec::new();
    for &p in &cfg.dilution.p {
        let mut ns = Vec::new();
        let mut means = Vec::new();
        for &n in &cfg.graph.sizes {
            let lengths: Vec<usize> = (0..cfg.replicates)
                .into_par_iter()
                .map(|i| {
                    let seed = ctx.seed(i);
                    let dg = dilute_bonds(Arc::new(gen_erdos_renyi(n, mu, seed)?), p, seed)?;
                    Ok(longest_path_dfs(&dg, DFS_RESTARTS, seed).length())
                })
                .collect::<Result<_>>()?;
            ctx.write(format!("replicates/er{n}_p{p}.csv"), |w| {
                writeln!(w, "replicate,longest_path")?;
                lengths.iter().enumerate().try_for_each(|(i, l)| writeln!(w, "{i},{l}"))
            })?;
            let xs: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
            let m = stats::mean(&xs);
            agg.push(format!("{n},{p},{m},{}", stats::std_error(&xs)));
            ns.push(n as f64);
            means.push(m);
        }
        if mu * p != 1.0 {
            ctx.notes.push(format!("nu = {} is off the critical line", mu * p));
        }
        log_log_exponent(ctx, "longest_path_exponent", &[("p", p), ("nu", mu * p)], &ns, &means, Regime::CriticalEr)?;
    }
    ctx.write("aggregate.csv", |w| {
        writeln!(w, "size,p,mean_longest_path,std_error")?;
        agg.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}

/// Attempts per requested crossing configuration before giving up.
const CROSSING_ATTEMPT_FACTOR: usize = 50;

fn critical_2d(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let mut agg = Vec::new();
    for &p in &cfg.dilution.p {
        let mut ns = Vec::new();
        let mut means = Vec::new();
        for &side in &cfg.graph.sizes {
            let base = Arc::new(gen_lattice2d(side)?);
            let rect = Rect::new(0, side - 1, 0, side - 1);
            let attempts = cfg.replicates * CROSSING_ATTEMPT_FACTOR;
            let found: Vec<Option<usize>> = (0..attempts)
                .into_par_iter()
                .map(|i| {
                    let dg = dilute_bonds(base.clone(), p, ctx.seed(i))?;
                    Ok(crossing_path(&dg, rect, Orientation::LeftRight)?.map(|path| path.length()))
                })
                .collect::<Result<_>>()?;
            let lengths: Vec<(usize, usize)> = found
                .iter()
                .enumerate()
                .filter_map(|(i, l)| l.map(|l| (i, l)))
                .take(cfg.replicates)
                .collect();
            if lengths.is_empty() {
                ctx.notes.push(format!("no crossing at side {side}, p={p} in {attempts} configurations"));
                continue;
            }
            ctx.write(format!("replicates/lattice{side}_p{p}.csv"), |w| {
                writeln!(w, "replicate,crossing_length")?;
                lengths.iter().try_for_each(|(i, l)| writeln!(w, "{i},{l}"))
            })?;
            let xs: Vec<f64> = lengths.iter().map(|&(_, l)| l as f64).collect();
            let m = stats::mean(&xs);
            agg.push(format!("{side},{p},{},{m},{}", xs.len(), stats::std_error(&xs)));
            ns.push((side * side) as f64);
            means.push(m);
        }
        log_log_exponent(ctx, "crossing_path_exponent", &[("p", p)], &ns, &means, Regime::Critical2d)?;
    }
    ctx.write("aggregate.csv", |w| {
        writeln!(w, "size,p,configurations,mean_crossing_length,std_error")?;
        agg.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}

fn arrhenius(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let mut table = OracleTable::new(["size", "lambda"]);
    for &lambda in &cfg.lambda {
        let taus = cfg
            .graph
            .sizes
            .par_iter()
            .map(|&s| Ok(exact_mean_extinction(&DilutedGraph::undiluted(Arc::new(gen_path(s)?)), lambda)?))
            .collect::<Result<Vec<f64>>>()?;
        for (&s, &tau) in cfg.graph.sizes.iter().zip(&taus) {
            table.push(vec![s.to_string(), lambda.to_string()], tau)?;
        }
        let points: Vec<(f64, f64)> = cfg.graph.sizes.iter().map(|&s| s as f64).zip(taus).collect();
        let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let f = fit::fit_exponential(&points, (lo, hi))?;
        let mut est = Estimate::new("a_rate", &[("lambda", lambda)], f.slope).with_fit(f);
        if let Some(g) = cfg.constants.and_then(|c| c.gamma2) {
            est = est.predicted(g, None);
        }
        ctx.estimates.push(est);
    }
    ctx.write("aggregate.csv", |w| table.write_csv(w))
}

fn phase_scan(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let times: Vec<f64> = cfg.schedule.times().into_iter().filter(|&t| t < cfg.t_max).collect();
    let mu = cfg.graph.mu.unwrap_or(1.0);
    let mut agg = Vec::new();
    for &size in &cfg.graph.sizes {
        let shared = shared_graph(cfg, size)?;
        let n = n_vertices(cfg.graph.family, size);
        for &p in &cfg.dilution.p {
            let largest: Vec<f64> = (0..cfg.replicates)
                .into_par_iter()
                .map(|i| {
                    let dg = replicate_graph(cfg, &shared, size, p, ctx.seed(i))?;
                    Ok(percolate::components(&dg).largest as f64 / n as f64)
                })
                .collect::<Result<_>>()?;
            let largest = stats::mean(&largest);
            let mut lambda_c = None;
            for &lambda in &cfg.lambda {
                let trajs: Vec<Trajectory> = (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let seed = ctx.seed(i);
                        let dg = replicate_graph(cfg, &shared, size, p, seed)?;
                        Ok(cpsim::run_contact(&dg, lambda, cfg.t_max, &times, seed)?)
                    })
                    .collect::<Result<_>>()?;
                let dir = format!("replicates/{}{size}_p{p}_lambda{lambda}", family_tag(cfg));
                for (i, tr) in trajs.iter().enumerate() {
                    ctx.write(format!("{dir}/rep{i:04}.csv"), |w| tr.write_csv(w))?;
                }
                let at_end: Vec<u64> = trajs
                    .iter()
                    .map(|tr| if tr.extinction.censored { tr.samples.last().map_or(0, |s| s.1) } else { 0 })
                    .collect();
                let u = at_end.iter().sum::<u64>() as f64 / (n * trajs.len()) as f64;
                let alive = at_end.iter().filter(|&&c| c > 0).count() as f64 / trajs.len() as f64;
                if lambda_c.is_none() && alive >= 0.5 {
                    lambda_c = Some(lambda);
                }
                agg.push(format!(
                    "{size},{p},{},{lambda},{largest},{u},{alive}",
                    if cfg.graph.family == Family::ErdosRenyi { mu * p } else { p }
                ));
            }
            if let Some(l) = lambda_c {
                ctx.estimates
                    .push(Estimate::new("lambda_c_proxy", &[("size", size as f64), ("p", p)], l));
            }
        }
    }
    ctx.write("aggregate.csv", |w| {
        writeln!(w, "size,p,nu,lambda,largest_fraction,density_at_t_max,surviving_fraction")?;
        agg.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}
