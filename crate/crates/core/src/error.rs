use thiserror::Error;

/// Errors produced by input validation and by the LP solver front end.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A scalar argument was NaN or outside its documented domain.
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An integer argument was outside its documented domain.
    #[error("invalid parameter {name}: {value} ({reason})")]
    InvalidInteger {
        name: &'static str,
        value: i64,
        reason: &'static str,
    },

    /// Vector lengths do not agree.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A distribution failed normalization or nonnegativity checks.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An LP that is feasible by construction came back infeasible/unbounded.
    #[error("internal LP failure: {0}")]
    LpFailure(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn int(name: &'static str, value: i64, reason: &'static str) -> Self {
        Error::InvalidInteger {
            name,
            value,
            reason,
        }
    }
}
