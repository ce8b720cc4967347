use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A spatial coordinate fell outside `[0, l]`.
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Model or scenario construction rejected by an invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("symmetric eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("simulation diverged at step {step} (t = {t}): |z| exceeded {limit:e}")]
    Divergence { step: usize, t: f64, limit: f64 },

    /// A raised-cosine support would need clamping under the strict edge policy.
    #[error("raised-cosine support [{lo}, {hi}] exceeds interval {interval} = [{cell_lo}, {cell_hi}]")]
    SupportExceedsInterval {
        interval: usize,
        lo: f64,
        hi: f64,
        cell_lo: f64,
        cell_hi: f64,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
