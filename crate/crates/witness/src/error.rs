use thiserror::Error;

use idealkit_core::error::{BuildError, EvalError, ValueError};
use idealkit_core::json::JsonError;
use idealkit_core::sets::NatSet;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("{0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("index pool exhausted after {} picks; blocked by μ_{}", picked.len(), blocking.map_or("?".to_string(), |t| t.to_string()))]
    PoolExhausted { picked: Vec<usize>, blocking: Option<usize> },
    #[error("window exhausted while building F_{row}")]
    WindowExhausted { row: usize, partial: Vec<NatSet> },
    #[error("certificate does not re-validate: {0}")]
    Mismatch(String),
}

impl From<ValueError> for WitnessError {
    fn from(e: ValueError) -> Self {
        WitnessError::Eval(EvalError::Value(e))
    }
}

impl WitnessError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        WitnessError::Invalid(msg.into())
    }
}
