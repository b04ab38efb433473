use thiserror::Error;

#[derive(Debug, Error)]
pub enum HartreeError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid parameter {name}: {reason}")]
    Param { name: &'static str, reason: String },
    #[error("grid mismatch between fields")]
    GridMismatch,
    #[error("aliasing guard: spectral tail fraction {tail:.3e} exceeds {limit:.1e}")]
    Aliasing { tail: f64, limit: f64 },
    #[error("rescaled support leaves the box")]
    Support,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("zero field")]
    ZeroField,
    #[error("config error at key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HartreeError>;

pub(crate) fn param_err(name: &'static str, reason: impl Into<String>) -> HartreeError {
    HartreeError::Param {
        name,
        reason: reason.into(),
    }
}
