use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid probability {value} ({what})")]
    InvalidProbability { what: &'static str, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wrong graph kind: expected {expected}, found {found}")]
    WrongKind { expected: &'static str, found: String },
    #[error("input too large: {what} is {actual}, limit {limit}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("outside asymptotic regime: {0}")]
    Regime(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("linear solve did not converge after {sweeps} sweeps (residual {residual:e})")]
    Solver { sweeps: usize, residual: f64 },
    #[error("missing constant `{0}`: it must be estimated and supplied")]
    MissingConstant(&'static str),
    #[error("paths do not intersect: crossing {0} and crossing {1}")]
    Disjoint(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_prob(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { what, value })
    }
}
