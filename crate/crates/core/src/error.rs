use thiserror::Error;

/// Errors raised by the computation engine.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An algebraic precondition failed (division by zero, pole hit, ...).
    #[error("algebra: {0}")]
    Algebra(String),
    /// A truncated series was asked for information beyond its precision.
    #[error("precision: {0}")]
    Precision(String),
    /// A structural expectation failed, e.g. a pole that should cancel did not.
    #[error("convention check failed: {0}")]
    Convention(String),
    /// A verified identity does not hold; `detail` names the first mismatch.
    #[error("identity {name} failed: {detail}")]
    Identity { name: String, detail: String },
    /// Malformed user input (surface data, CLI arguments).
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn identity(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CoreError::Identity { name: name.into(), detail: detail.into() }
    }
}
