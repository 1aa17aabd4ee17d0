use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("polynomial is not real-rooted: {0}")]
    NotRealRooted(String),

    #[error("tuple is not symmetric about zero (mismatch {mismatch:e})")]
    NotSymmetric { mismatch: f64 },

    #[error("complex root iteration did not converge after {attempts} attempts")]
    NoConvergence { attempts: usize },

    #[error("step unstable at t = {time}: |x| = {magnitude:e} (reduce dt)")]
    StepUnstable { time: f64, magnitude: f64 },
}

impl Error {
    /// Failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotRealRooted(_) | Error::NoConvergence { .. } | Error::StepUnstable { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
