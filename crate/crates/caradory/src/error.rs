use thiserror::Error;

/// Errors surfaced by oracles, objectives, solvers, and loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The linear term is zero, so every feasible point is a minimizer.
    /// Callers treat this as convergence.
    #[error("degenerate gradient: zero vector has no linear minimizer on a ball")]
    DegenerateGradient,

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("numerical failure in {what}: residual {residual:.3e} after {iterations} iterations")]
    NonConvergent {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bound evaluation needs constant `{0}` which was not supplied")]
    MissingConstant(&'static str),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
