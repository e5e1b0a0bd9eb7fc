use idealkit_core::{EvalError, SetError};
use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PathologyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("support has {size} points, above the cap of {cap}")]
    SupportCap { size: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not a submeasure: {0}")]
    NotSubmeasure(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("domination fails on {set}: {lhs} > {rhs}")]
    NotDominated { set: String, lhs: String, rhs: String },
    #[error("assertion failed: {0}")]
    Mismatch(String),
}
