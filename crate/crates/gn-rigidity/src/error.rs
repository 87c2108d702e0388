use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {what} at alpha = {alpha}")]
    Pole { what: &'static str, alpha: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("radius {r} outside chart (r_max = {r_max})")]
    OutOfChart { r: f64, r_max: f64 },

    #[error("{0} is not available for this metric")]
    Unavailable(&'static str),

    #[error("normalization violated: {0}")]
    Normalization(String),

    #[error("cutoff jet not positive: {0}")]
    Positivity(String),

    #[error("range violation: {0}")]
    Range(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("chart capacity exceeded: need volume {need}, chart holds {have}")]
    Capacity { need: f64, have: f64 },

    #[error("representation error: {0}")]
    Representation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no sign change to bracket: {0}")]
    NoBracket(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
