use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] cpdilute::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown experiment `{0}`; known: {known}", known = crate::experiments::EXPERIMENTS.join(", "))]
    UnknownExperiment(String),
    #[error("need at least {needed} usable points in window [{lo}, {hi}], found {found}")]
    InsufficientPoints {
        needed: usize,
        found: usize,
        lo: f64,
        hi: f64,
    },
    #[error("survival times censored at sizes {0:?}; raise t_max or shrink the sizes")]
    Censored(Vec<usize>),
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
