use thiserror::Error;

/// Errors raised by the numeric and training routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: String, right: String },
    #[error("index {index} out of range for dimension {dim}")]
    Range { index: usize, dim: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{routine} did not converge within {sweeps} sweeps")]
    NoConvergence { routine: &'static str, sweeps: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn shapes(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Dimension {
            left: format!("{}x{}", left.0, left.1),
            right: format!("{}x{}", right.0, right.1),
        }
    }

    pub(crate) fn lengths(left: usize, right: usize) -> Self {
        Error::Dimension {
            left: left.to_string(),
            right: right.to_string(),
        }
    }

    /// True for failures of the iterative numeric kernels, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
