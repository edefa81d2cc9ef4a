//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by terrain ingestion, model construction, and planning.
#[derive(Debug, Error)]
pub enum Error {
    /// Input file could not be parsed; carries the 1-based line number.
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    /// Parsed data violates a validity requirement (non-finite values,
    /// irregular lattice, dimension mismatch).
    #[error("data error: {0}")]
    Data(String),

    /// A requested region or node lies outside the available extent.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// Invalid configuration (bad parameter values, unknown keys).
    #[error("config error: {0}")]
    Config(String),

    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A slip curve reached its singular value at the queried steepness.
    #[error("slip singularity: {curve} saturates at steepness {alpha_deg:.2} deg")]
    SlipSingularity { curve: &'static str, alpha_deg: f64 },

    /// The two fronts exhausted their frontiers without meeting.
    #[error("goal unreachable from start within the valid region")]
    Unreachable,

    /// Path extraction exceeded its step budget.
    #[error("path extraction diverged near ({x:.3}, {y:.3})")]
    Divergence { x: f64, y: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
