//! Versioned JSON form of obstruction certificates.

use serde_json::Value;

use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_core::dsl::parse_expr;
use idealkit_core::json::{
    field, object, qvalue_from_json, qvalue_to_json, set_from_json, set_to_json, JsonError, SCHEMA_VERSION,
};

use crate::error::WitnessError;
use crate::obstruction::ObstructionCertificate;

pub const SEMANTICS: &str = "finite-level evidence: every t-subfamily has union value >= epsilon";

impl ObstructionCertificate {
    pub fn to_json(&self) -> Value {
        object([
            ("kind", Value::from("obstruction")),
            ("version", Value::from(SCHEMA_VERSION)),
            ("expr", Value::from(self.expr.to_string())),
            ("epsilon", qvalue_to_json(&self.epsilon)),
            ("delta", qvalue_to_json(&self.delta)),
            ("t", Value::from(self.t)),
            ("family", Value::Array(self.family.members().iter().map(set_to_json).collect())),
            ("memberValues", Value::Array(self.member_values.iter().map(qvalue_to_json).collect())),
            ("minUnionValue", qvalue_to_json(&self.min_union_value)),
            ("semantics", Value::from(SEMANTICS)),
        ])
    }

    /// Reads a certificate and re-runs the check behind it.
    pub fn from_json(v: &Value) -> Result<ObstructionCertificate, WitnessError> {
        if field(v, "kind", "$")?.as_str() != Some("obstruction") {
            return Err(JsonError::new("$.kind", "not an obstruction certificate").into());
        }
        if field(v, "version", "$")?.as_u64() != Some(SCHEMA_VERSION) {
            return Err(JsonError::new("$.version", "unsupported version").into());
        }
        let text = field(v, "expr", "$")?
            .as_str()
            .ok_or_else(|| JsonError::new("$.expr", "expected DSL text"))?;
        let expr = parse_expr(text).map_err(|e| JsonError::new("$.expr", e.to_string()))?;
        let family = family_from_json(field(v, "family", "$")?, expr.sort(), "$.family")?;
        let values = |key: &str| -> Result<Vec<_>, WitnessError> {
            let path = format!("$.{key}");
            field(v, key, "$")?
                .as_array()
                .ok_or_else(|| JsonError::new(&path, "expected a list"))?
                .iter()
                .enumerate()
                .map(|(i, x)| Ok(qvalue_from_json(x, &format!("{path}[{i}]"))?))
                .collect()
        };
        let cert = ObstructionCertificate {
            epsilon: qvalue_from_json(field(v, "epsilon", "$")?, "$.epsilon")?,
            delta: qvalue_from_json(field(v, "delta", "$")?, "$.delta")?,
            t: field(v, "t", "$")?
                .as_u64()
                .ok_or_else(|| JsonError::new("$.t", "expected a natural"))? as usize,
            member_values: values("memberValues")?,
            min_union_value: qvalue_from_json(field(v, "minUnionValue", "$")?, "$.minUnionValue")?,
            expr,
            family,
        };
        cert.revalidate()?;
        Ok(cert)
    }
}

/// A family file: a JSON list of point lists.
pub fn family_from_json(
    v: &Value,
    sort: idealkit_core::sets::Sort,
    path: &str,
) -> Result<DisjointFamily, WitnessError> {
    let members = v
        .as_array()
        .ok_or_else(|| JsonError::new(path, "expected a list of sets"))?
        .iter()
        .enumerate()
        .map(|(i, m)| set_from_json(m, &format!("{path}[{i}]"), sort))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DisjointFamily::new(members, Flavor::Disj)?)
}
