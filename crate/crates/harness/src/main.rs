use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cpdilute::cpsim;
use cpdilute::graphgen::{dilute_bonds, dilute_sites, gen_erdos_renyi, gen_lattice2d, gen_path, DilutedGraph, Graph};
use cpdilute::percolate::{self, has_crossing, longest_path_dfs, max_active_run, Orientation, Rect};
use cpdilute::theory::{self, Regime, ScalingParams};
use harness::oracle_check::{oracle_check, OracleCheckOptions};
use harness::{run_experiment, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "cpdilute", version, about = "Contact process on randomly diluted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a diluted graph and write its edge list and mask.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        /// Edge-list output file.
        #[arg(long)]
        out: PathBuf,
        /// Mask output file.
        #[arg(long)]
        mask_out: Option<PathBuf>,
    },
    /// Structural statistics of one diluted graph, as JSON.
    Percolate {
        #[command(flatten)]
        graph: GraphArgs,
        /// Component-size histogram CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Restarts of the longest-path search (0 skips it).
        #[arg(long, default_value_t = 0)]
        dfs_restarts: usize,
    },
    /// Contact-process replicates from all occupied.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// First sample time of the geometric schedule.
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        #[arg(long, default_value_t = 1.3)]
        ratio: f64,
        /// Output directory for trajectory and extinction CSVs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form and asymptotic quantities, as JSON.
    Theory {
        #[command(subcommand)]
        query: TheoryQuery,
    },
    /// Compare simulation and structural algorithms with exact oracles.
    OracleCheck {
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, hide = true)]
        lambda_skew: f64,
    },
    /// Run a named experiment.
    Experiment {
        name: String,
        /// JSON config; the built-in preset is used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the effective config and exit.
        #[arg(long)]
        print_config: bool,
    },
}

#[derive(Subcommand)]
enum TheoryQuery {
    /// Survival-time growth law of a regime.
    Predict {
        #[arg(long)]
        regime: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        gamma2: Option<f64>,
        #[arg(long)]
        eta2: Option<f64>,
        #[arg(long)]
        eta_er: Option<f64>,
    },
    /// Cluster-size decay rate alpha(nu).
    Alpha {
        #[arg(long)]
        nu: f64,
    },
    /// Density from the exponential mixture, exact and asymptotic.
    Noest {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Erdős–Rényi density by saddle point and by quadrature.
    ErDensity {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        a_rate: f64,
    },
    /// Largest subcritical component size.
    LargestCluster {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        nu: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Path1d,
    Lattice2d,
    ErdosRenyi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Bond,
    Site,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertex count, or side length for lattices.
    #[arg(long)]
    size: usize,
    /// Mean degree for Erdős–Rényi graphs.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value = "bond")]
    mode: ModeArg,
    /// Keep probability.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GraphArgs {
    fn build(&self) -> Result<DilutedGraph> {
        let g: Graph = match self.family {
            FamilyArg::Path1d => gen_path(self.size)?,
            FamilyArg::Lattice2d => gen_lattice2d(self.size)?,
            FamilyArg::ErdosRenyi => {
                let mu = self.mu.context("--mu is required for erdos-renyi")?;
                gen_erdos_renyi(self.size, mu, self.seed)?
            }
        };
        let g = Arc::new(g);
        Ok(match self.mode {
            ModeArg::Bond => dilute_bonds(g, self.p, self.seed)?,
            ModeArg::Site => dilute_sites(g, self.p, self.seed)?,
        })
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { graph, out, mask_out } => {
            let dg = graph.build()?;
            let mut w = create(&out)?;
            dg.base().write_edge_list(&mut w)?;
            w.flush()?;
            if let Some(m) = mask_out {
                let mut w = create(&m)?;
                dg.write_mask(&mut w)?;
                w.flush()?;
            }
            print_json(&serde_json::json!({
                "vertices": dg.n(),
                "edges": dg.base().n_edges(),
                "open_edges": dg.n_open_edges(),
                "present_vertices": dg.n_present(),
                "fingerprint": dg.fingerprint(),
            }))?;
        }
        Command::Percolate {
            graph,
            histogram,
            dfs_restarts,
        } => {
            let dg = graph.build()?;
            let report = percolate::components(&dg);
            let mut v = serde_json::json!({
                "vertices": dg.n(),
                "largest_component": report.largest,
                "components": report.n_components,
            });
            if let Some(h) = histogram {
                let mut w = create(&h)?;
                report.write_csv(&mut w)?;
                w.flush()?;
            }
            if dfs_restarts > 0 {
                v["longest_path_dfs"] = longest_path_dfs(&dg, dfs_restarts, graph.seed).length().into();
            }
            match graph.family {
                FamilyArg::Path1d if matches!(graph.mode, ModeArg::Site) => {
                    v["max_active_run"] = max_active_run(&dg)?.into();
                }
                FamilyArg::Lattice2d => {
                    let s = graph.size - 1;
                    v["left_right_crossing"] = has_crossing(&dg, Rect::new(0, s, 0, s), Orientation::LeftRight)?.into();
                }
                _ => {}
            }
            print_json(&v)?;
        }
        Command::Simulate {
            graph,
            lambda,
            t_max,
            replicates,
            t0,
            ratio,
            out,
        } => {
            if !(t0 > 0.0 && ratio > 1.0) {
                bail!("schedule needs t0 > 0 and ratio > 1");
            }
            let dg = graph.build()?;
            let schedule = harness::config::Schedule::covering(t0, ratio, t_max).times();
            let mut ext = Vec::with_capacity(replicates);
            for i in 0..replicates {
                let seed = graph.seed.wrapping_add(i as u64);
                let tr = cpsim::run_contact(&dg, lambda, t_max, &schedule, seed)?;
                let mut w = create(&out.join(format!("trajectory_{i:04}.csv")))?;
                tr.write_csv(&mut w)?;
                w.flush()?;
                ext.push(tr.extinction);
            }
            let mut w = create(&out.join("extinction.csv"))?;
            cpsim::write_extinction_csv(&ext, &mut w)?;
            w.flush()?;
        }
        Command::Theory { query } => print_json(&theory_query(query)?)?,
        Command::OracleCheck {
            replicates,
            seed,
            lambda_skew,
        } => {
            let report = oracle_check(&OracleCheckOptions {
                lambda_skew,
                replicates,
                seed,
            })?;
            print!("{report}");
            if !report.all_passed() {
                eprintln!("failed checks: {}", report.failures().join(", "));
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Experiment {
            name,
            config,
            seed,
            out,
            print_config,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::preset(&name)?,
            };
            if cfg.experiment != name {
                bail!("config is for experiment `{}`, not `{name}`", cfg.experiment);
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output = o;
            }
            if print_config {
                println!("{}", cfg.to_json());
                return Ok(ExitCode::SUCCESS);
            }
            let summary = run_experiment(&cfg)?;
            for e in &summary.estimates {
                let pred = match (e.prediction, e.ratio) {
                    (Some(p), Some(r)) => format!("  prediction {p:.6}  ratio {r:.4}"),
                    _ => String::new(),
                };
                println!("{} {:?}: {:.6}{pred}", e.name, e.params, e.fitted);
            }
            for n in &summary.notes {
                println!("note: {n}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn theory_query(q: TheoryQuery) -> Result<serde_json::Value> {
    Ok(match q {
        TheoryQuery::Predict {
            regime,
            p,
            nu,
            gamma2,
            eta2,
            eta_er,
        } => {
            let r = Regime::parse(&regime).with_context(|| {
                let names: Vec<&str> = Regime::ALL.iter().map(|r| r.name()).collect();
                format!("unknown regime `{regime}`; known: {}", names.join(", "))
            })?;
            theory::scaling_predictions(
                r,
                &ScalingParams {
                    p,
                    nu,
                    gamma2,
                    eta2,
                    eta_er,
                },
            )?
            .to_json()
        }
        TheoryQuery::Alpha { nu } => serde_json::json!({ "nu": nu, "alpha": theory::alpha_nu(nu)? }),
        TheoryQuery::Noest { t, a, b } => serde_json::json!({
            "t": t,
            "integral": theory::noest_u_integral(t, a, b)?,
            "asymptotic": theory::noest_u_asymptotic(t, a, b).ok(),
            "x_star": theory::noest_x_star(t, a, b).ok(),
        }),
        TheoryQuery::ErDensity { t, nu, a_rate } => {
            let s = theory::er_u_saddle(t, nu, a_rate)?;
            serde_json::json!({
                "t": t,
                "saddle_u": s.u,
                "theta": s.theta,
                "saddle_size": s.s0,
                "quadrature_u": theory::er_u_quadrature(t, nu, a_rate)?,
            })
        }
        TheoryQuery::LargestCluster { n, nu } => {
            serde_json::json!({ "n": n, "nu": nu, "largest": theory::largest_cluster_asymptotic(n, nu)? })
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = harness::init_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(e.downcast_ref::<HarnessError>(), Some(HarnessError::UnknownExperiment(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
