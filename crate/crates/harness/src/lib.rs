//! Experiment runner, estimators and oracle checks for the `cpdilute`
//! toolkit.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod oracle_check;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, Estimate, Summary, EXPERIMENTS};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "CPDILUTE_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
}
