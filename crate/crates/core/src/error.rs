use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("truncation too small: {msg} (need at least {required})")]
    Truncation { msg: String, required: usize },
    #[error("grid extent: {0}")]
    Extent(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("target {target} unreachable (supremum {supremum})")]
    Unreachable { target: f64, supremum: f64 },
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
