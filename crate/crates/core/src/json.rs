//! JSON forms of values, points and sets shared by every report schema.
//!
//! Rationals are `{"num": N, "den": D}`; integers outside the `i64` range are
//! written as decimal strings. `+∞` is `"inf"`, and `r^(1/q)` is
//! `{"num": N, "den": D, "root": q}`. Naturals are numbers and grid points
//! are `[row, col]` pairs.

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::qvalue::{QValue, Rational};
use crate::sets::{Point, PointSet, Sort};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad JSON at {path}: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

impl JsonError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        JsonError {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn big_number(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => Value::Number(v.into()),
        Err(_) => Value::String(n.to_string()),
    }
}

fn parse_big(v: &Value, path: &str) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().unwrap()),
        Value::String(s) => s.parse().map_err(|_| JsonError::new(path, "not an integer")),
        _ => Err(JsonError::new(path, "not an integer")),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    json!({"num": big_number(r.numer()), "den": big_number(r.denom())})
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational, JsonError> {
    let obj = v.as_object().ok_or_else(|| JsonError::new(path, "expected a rational object"))?;
    let num = parse_big(obj.get("num").unwrap_or(&Value::Null), &format!("{path}.num"))?;
    let den = parse_big(obj.get("den").unwrap_or(&Value::Null), &format!("{path}.den"))?;
    if den == BigInt::from(0) {
        return Err(JsonError::new(path, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn qvalue_to_json(q: &QValue) -> Value {
    match q {
        QValue::Finite(r) => rational_to_json(r),
        QValue::Infinity => Value::String("inf".into()),
        QValue::Root { radicand, index } => {
            let mut m = rational_to_json(radicand);
            m.as_object_mut().unwrap().insert("root".into(), Value::Number((*index).into()));
            m
        }
    }
}

pub fn qvalue_from_json(v: &Value, path: &str) -> Result<QValue, JsonError> {
    match v {
        Value::String(s) if s == "inf" => Ok(QValue::Infinity),
        Value::Object(obj) => {
            let r = rational_from_json(v, path)?;
            match obj.get("root") {
                None => QValue::rational(r).map_err(|e| JsonError::new(path, e.to_string())),
                Some(q) => {
                    let q = q
                        .as_u64()
                        .and_then(|q| u32::try_from(q).ok())
                        .ok_or_else(|| JsonError::new(format!("{path}.root"), "not a root index"))?;
                    QValue::root(r, q).map_err(|e| JsonError::new(path, e.to_string()))
                }
            }
        }
        _ => Err(JsonError::new(path, "expected a value")),
    }
}

pub fn point_to_json(p: Point) -> Value {
    match p {
        Point::Nat(n) => Value::Number(n.into()),
        Point::Grid(r, c) => json!([r, c]),
    }
}

pub fn point_from_json(v: &Value, path: &str) -> Result<Point, JsonError> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(Point::Nat)
            .ok_or_else(|| JsonError::new(path, "not a natural")),
        Value::Array(a) if a.len() == 2 => {
            let r = a[0].as_u64().ok_or_else(|| JsonError::new(path, "bad row"))?;
            let c = a[1].as_u64().ok_or_else(|| JsonError::new(path, "bad column"))?;
            Ok(Point::Grid(r, c))
        }
        _ => Err(JsonError::new(path, "expected a natural or a [row, col] pair")),
    }
}

pub fn set_to_json(s: &PointSet) -> Value {
    Value::Array(s.canonical_points().into_iter().map(point_to_json).collect())
}

/// Reads a set; the sort of an empty list is taken from `empty_sort`.
pub fn set_from_json(v: &Value, path: &str, empty_sort: Sort) -> Result<PointSet, JsonError> {
    let items = v.as_array().ok_or_else(|| JsonError::new(path, "expected a list of points"))?;
    let points = items
        .iter()
        .enumerate()
        .map(|(i, p)| point_from_json(p, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let sort = points.first().map_or(empty_sort, |p| p.sort());
    PointSet::from_points(sort, &points).map_err(|e| JsonError::new(path, e.to_string()))
}

/// JSON object; keys come out sorted.
pub fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

pub fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError::new(path, format!("missing field {key:?}")))
}
