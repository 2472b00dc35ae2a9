//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument was outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An orbit coordinate left the unit square by more than the drift
    /// tolerance. The library never clamps silently; this is reported instead.
    #[error("numerical drift: coordinate {value} outside [0,1] by more than {tol}")]
    NumericalDrift { value: f64, tol: f64 },
    /// A root finder was called on a bracket without a sign change.
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    /// A function evaluation returned NaN or infinity where a finite value was required.
    #[error("non-finite evaluation at {at}")]
    NonFinite { at: f64 },
    /// A scan over (0, 1/2) found no downward crossing of 1.
    /// This is a meaningful outcome: the quantity stays above 1 on the interval.
    #[error("no crossing of level 1 in (0, 1/2)")]
    NoCrossing,
    /// An index (branch number, symbol) was out of range.
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    /// A geometric predicate could not be decided at the configured tolerance
    /// (the input sits within epsilon of a decision boundary).
    #[error("indeterminate at tolerance {tol}: {what}")]
    Indeterminate { what: String, tol: f64 },
    /// A construction self-check failed (e.g. a region that must map into
    /// itself does not, signalling a bug or a parameter on a case boundary).
    #[error("verification failure: {0}")]
    Verification(String),
    /// Input/output error from persistence helpers.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// JSON (de)serialization error from persistence helpers.
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
