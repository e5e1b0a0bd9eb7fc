use thiserror::Error;

use crate::sets::Sort;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValueError {
    #[error("negative value {0} where a nonnegative one is required")]
    Negative(String),
    #[error("root index must be positive")]
    ZeroRootIndex,
    #[error("result not representable exactly: {0}")]
    Inexact(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("point {point} lies outside the window bound {bound}")]
    OutsideWindow { point: String, bound: u64 },
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("empty half-open block [{lo}, {hi})")]
    EmptyBlock { lo: u64, hi: u64 },
}

/// Invariant violations found while building or validating an expression.
/// `path` names the offending node, e.g. `sup[1]/qmix[0]`.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct ExprError {
    pub path: String,
    pub message: String,
}

impl ExprError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ExprError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("expression over {expr} evaluated on a {set} argument")]
    SortMismatch { expr: Sort, set: Sort },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid expression at {0}")]
    Invalid(#[from] ExprError),
}

/// Failures of builders and checkers that go beyond a single node.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Pairing(#[from] crate::pairing::PairingError),
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("{0}")]
    Invalid(String),
}

impl BuildError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        BuildError::Invalid(msg.into())
    }
}

impl From<ValueError> for BuildError {
    fn from(e: ValueError) -> Self {
        BuildError::Eval(EvalError::Value(e))
    }
}
