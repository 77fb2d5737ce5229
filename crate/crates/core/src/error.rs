use std::fmt;

use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid arguments: the caller asked for something ill-posed.
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(NumericalFailure),
}

/// Details of a quadrature (or search) that failed to converge.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericalFailure {
    pub message: String,
    /// Best available estimate (magnitude, for complex integrals).
    pub estimate: f64,
    pub error_bound: f64,
    /// Estimate after each refinement level.
    pub trace: Vec<f64>,
    /// Set when the estimates blow up instead of settling.
    pub diverging: bool,
}

impl fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (estimate {:e}, error bound {:e}, {} levels{})",
            self.message,
            self.estimate,
            self.error_bound,
            self.trace.len(),
            if self.diverging { ", diverging" } else { "" }
        )
    }
}

impl Error {
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }

    /// True for numerical failures whose estimates grow without bound.
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Numerical(n) if n.diverging)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

macro_rules! ensure_usage {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::usage(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_usage;
