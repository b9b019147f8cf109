use thiserror::Error;

use crate::models::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside the domain of a kernel or solver.
    #[error("{name} = {value} is out of domain: requires {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Model parameters violate one or more modelling assumptions.
    #[error(transparent)]
    Invalid(#[from] ValidationReport),

    /// A valid model that does not satisfy the hypotheses of the requested result.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// Too little data to estimate a quantity a computation needs.
    #[error("not enough data to estimate {0}")]
    Insufficient(&'static str),

    #[error("no interior maximum on [{lo}, {hi}]: {reason}")]
    NoInteriorMaximum { lo: f64, hi: f64, reason: String },

    #[error("hurdle policy does not fit the {regime} regime: {reason}")]
    Policy {
        regime: &'static str,
        reason: &'static str,
    },

    #[error("CSV input has no header row (expected test_id,primary_dim,primary_effect[,secondary_effect[,adopted]])")]
    MissingHeader,

    #[error("unexpected CSV header: {0}")]
    BadHeader(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement: "a finite value",
        })
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement: "a finite value > 0",
        })
    }
}
