use std::fmt;

use idealkit_core::error::{BuildError, EvalError, ExprError, ParseError, SetError};
use idealkit_core::json::JsonError;
use idealkit_pathology::PathologyError;
use idealkit_witness::WitnessError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// An error together with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        CliError { code: EXIT_RESOURCE, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn set_code(e: &SetError) -> i32 {
    match e {
        SetError::OutsideWindow { .. } => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn eval_code(e: &EvalError) -> i32 {
    match e {
        EvalError::Set(s) => set_code(s),
        _ => EXIT_USAGE,
    }
}

fn build_code(e: &BuildError) -> i32 {
    match e {
        BuildError::WindowOverflow(_) => EXIT_RESOURCE,
        BuildError::Eval(e) => eval_code(e),
        BuildError::Set(s) => set_code(s),
        _ => EXIT_USAGE,
    }
}

macro_rules! with_code {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                let code: fn(&$ty) -> i32 = $code;
                CliError { code: code(&e), message: e.to_string() }
            }
        }
    };
}

with_code!(ParseError, |_| EXIT_USAGE);
with_code!(JsonError, |_| EXIT_USAGE);
with_code!(ExprError, |_| EXIT_USAGE);
with_code!(serde_json::Error, |_| EXIT_USAGE);
with_code!(SetError, set_code);
with_code!(EvalError, eval_code);
with_code!(BuildError, build_code);
with_code!(WitnessError, |e| match e {
    WitnessError::ResourceCap(_) | WitnessError::WindowExhausted { .. } | WitnessError::PoolExhausted { .. } => {
        EXIT_RESOURCE
    }
    WitnessError::Eval(e) => eval_code(e),
    WitnessError::Build(e) => build_code(e),
    _ => EXIT_USAGE,
});
with_code!(PathologyError, |e| match e {
    PathologyError::SupportCap { .. } => EXIT_RESOURCE,
    PathologyError::Eval(e) => eval_code(e),
    PathologyError::Set(s) => set_code(s),
    _ => EXIT_USAGE,
});
