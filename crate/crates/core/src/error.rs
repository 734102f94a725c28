use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A quantity was evaluated outside its domain (log of a non-positive value, etc).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("closure validation failed: {0}")]
    Closure(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("sparse linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("continuation stalled at stage {stage} after {bisections} bisections")]
    PathStalled { stage: usize, bisections: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
