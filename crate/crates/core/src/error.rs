use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} is outside the domain of {routine}: {reason}")]
    Domain {
        routine: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{routine} did not converge within {iterations} iterations")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("exp({exponent}) overflows and the log-domain fallback failed")]
    OverflowGuard { exponent: f64 },

    #[error("order nu = {nu} exceeds the precision limit {cap} of the quadrature at x = {x}")]
    PrecisionLoss { nu: f64, x: f64, cap: f64 },

    #[error("quadrature hit the panel cap ({panels}) before reaching tolerance")]
    QuadratureFailure { panels: usize },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("ODE step control failed at s = {s} (step {step})")]
    OdeFailure { s: f64, step: f64 },

    #[error("could not bracket zero n = {n} at z = {z}")]
    BracketFailure { n: u32, z: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("output error: {0}")]
    Output(String),

    #[error("zero n = {n}: {source}")]
    AtIndex { n: u32, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(routine: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            routine,
            value,
            reason,
        }
    }

    /// True for errors caused by the caller's arguments rather than a
    /// numerical failure.
    pub fn is_argument_error(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::InvalidConfig(_) => true,
            Error::AtIndex { source, .. } => source.is_argument_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
