//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("axis {axis} contains duplicate sample point {point}")]
    DuplicateAxisPoint { axis: usize, point: Complex64 },

    #[error("value count {values} does not match shape product {expected}")]
    ShapeMismatch { values: usize, expected: usize },

    #[error("non-finite sample value at flat index {index}")]
    NonFiniteValue { index: usize },

    #[error("axis {axis}: index {index} out of bounds (len {len})")]
    IndexOutOfBounds {
        axis: usize,
        index: usize,
        len: usize,
    },

    #[error("axis {axis}: index {index} already in the support set")]
    DuplicateSupport { axis: usize, index: usize },

    #[error("axis {axis} has an empty support set")]
    EmptySupport { axis: usize },

    #[error("support covers the whole grid; no samples left to fit")]
    NoFreeSamples,

    #[error("coordinate {point} on axis {axis} collides with a support point")]
    SupportCollision { axis: usize, point: Complex64 },

    #[error("denominator vanished at {point:?}; the model has a spurious pole there")]
    ZeroDenominator { point: Vec<Complex64> },

    #[error("weight is zero at support tuple {tuple:?}; interpolation undefined there")]
    ZeroWeightAtSupport { tuple: Vec<usize> },

    #[error("evaluation failed at grid tuple {tuple:?} ({point:?}); fit aborted")]
    PoleOnGrid {
        tuple: Vec<usize>,
        point: Vec<Complex64>,
    },

    #[error("greedy pick landed on interpolated tuple {tuple:?} with error {error:.3e}")]
    StalledGreedy { tuple: Vec<usize>, error: f64 },

    #[error("matrix is empty; nothing to solve")]
    EmptyMatrix,

    #[error("SVD did not converge")]
    SvdFailed,

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("each axis needs at least {needed} points; axis {axis} has {len}")]
    AxisTooShort {
        axis: usize,
        len: usize,
        needed: usize,
    },

    #[error("previous denominator is zero at row tuple {tuple:?}; cannot weight")]
    ZeroWeightingDenominator { tuple: Vec<usize> },

    #[error("invalid options: {context}")]
    InvalidOptions { context: String },

    #[error("all approximation errors are zero; nothing to select")]
    AllErrorsZero,
}
