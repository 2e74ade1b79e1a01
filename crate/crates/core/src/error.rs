use thiserror::Error;

use crate::Dim;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}; expected 1, 2 or 3")]
    InvalidDimension(u8),

    #[error("operation not defined in {dim}: {reason}")]
    UnsupportedDimension { dim: Dim, reason: &'static str },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("potential rejected: {0}")]
    Inadmissible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The integrator used up its step budget before reaching the cutoff.
    #[error("step budget of {max_steps} exhausted at r = {r}")]
    StepBudget { max_steps: usize, r: f64 },

    #[error("non-finite solution state at r = {r}")]
    NonFinite { r: f64 },

    #[error("step size underflow at r = {r}")]
    StepUnderflow { r: f64 },

    #[error("solution mixes dimensions: expected {expected}, got {found}")]
    DimensionMismatch { expected: Dim, found: Dim },

    #[error("pole indicator does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("design matrix is rank deficient ({n} poles, {samples} samples)")]
    RankDeficient { n: usize, samples: usize },

    #[error("no built-in model for {dim} with n = {n}")]
    UnknownModel { dim: Dim, n: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid fit specification: {0}")]
    InvalidFitSpec(String),

    /// Partial sums of the power-series expansion did not settle by order `k`.
    #[error("series not converged at k = {k}: last term {last_term:e}, partial estimate {estimate}")]
    SeriesNotConverged {
        k: usize,
        last_term: f64,
        estimate: f64,
    },
}
