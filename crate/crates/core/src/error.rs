use thiserror::Error;

use crate::potential::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` out of domain: {reason}")]
    ParameterDomain { name: &'static str, reason: String },

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("spectral multiplier `{label}` is not finite at momentum p = {momentum}")]
    MultiplierDomain { label: String, momentum: f64 },

    #[error("spectral multiplier `{label}` yields complex matrix entries (imaginary residue {residue:e})")]
    ComplexEntries { label: String, residue: f64 },

    #[error("evaluation failed at x = {x}: {reason}")]
    Evaluation { x: f64, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::ParameterDomain {
            name,
            reason: reason.into(),
        }
    }
}
