use serde_json::Value;
use sha2::{Digest, Sha256};

use idealkit_core::json::{object, SCHEMA_VERSION};

use crate::error::{EXIT_CHECK_FAILED, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A check failed and the artifacts hold the evidence.
    CheckFailed,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::CheckFailed => "check-failed",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => EXIT_OK,
            Outcome::CheckFailed => EXIT_CHECK_FAILED,
        }
    }
}

/// Result of one command: what went in, what came out, and the text shown
/// without `--json`.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: &'static str,
    /// Canonical form of every input that affects the output.
    pub inputs: Value,
    pub outcome: Outcome,
    pub artifacts: Vec<Value>,
    pub lines: Vec<String>,
}

impl RunReport {
    pub fn new(command: &'static str, inputs: Value) -> Self {
        RunReport {
            command,
            inputs,
            outcome: Outcome::Ok,
            artifacts: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn artifact(&mut self, v: Value) {
        self.artifacts.push(v);
    }

    pub fn fail_if(&mut self, failed: bool) {
        if failed {
            self.outcome = Outcome::CheckFailed;
        }
    }

    /// Hex SHA-256 of the compact JSON of `inputs`.
    pub fn inputs_digest(&self) -> String {
        let text = serde_json::to_string(&self.inputs).expect("JSON values serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_json(&self) -> Value {
        object([
            ("command", Value::from(self.command)),
            ("version", Value::from(SCHEMA_VERSION)),
            ("tool", Value::from(env!("CARGO_PKG_VERSION"))),
            ("inputsDigest", Value::from(self.inputs_digest())),
            ("inputs", self.inputs.clone()),
            ("outcome", Value::from(self.outcome.as_str())),
            ("artifacts", Value::Array(self.artifacts.clone())),
        ])
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
            s.push('\n');
            s
        } else {
            self.lines.iter().map(|l| format!("{l}\n")).collect()
        }
    }
}
