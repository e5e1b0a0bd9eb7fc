use serde_json::Value;

use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::json::{field, object, qvalue_from_json, qvalue_to_json, set_from_json, set_to_json, JsonError};
use idealkit_core::qvalue::QValue;
use idealkit_core::sets::{Point, PointSet, Sort};

use crate::error::PathologyError;

/// Largest point count of an explicit table.
pub const MAX_TABLE_POINTS: usize = 16;

/// A submeasure given by its value on every nonempty subset of a finite
/// point set.
///
/// Submeasures built from the expression language are all nonpathological,
/// so a table is the only way to feed a pathological one to the solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetTable {
    sort: Sort,
    points: Vec<Point>,
    /// Indexed by `mask - 1` over `points`.
    values: Vec<QValue>,
}

impl SubsetTable {
    /// Builds a table from a value function on masks and checks that it is
    /// monotone, subadditive and finite.
    pub fn from_fn(
        ground: &PointSet,
        mut f: impl FnMut(u32) -> QValue,
    ) -> Result<Self, PathologyError> {
        let points = ground.canonical_points();
        let n = points.len();
        if n == 0 || n > MAX_TABLE_POINTS {
            return Err(PathologyError::Invalid(format!("a table needs 1..={MAX_TABLE_POINTS} points, got {n}")));
        }
        let values: Vec<QValue> = (1u32..1 << n).map(&mut f).collect();
        let table = SubsetTable { sort: ground.sort(), points, values };
        table.validate()?;
        Ok(table)
    }

    fn at(&self, mask: u32) -> QValue {
        if mask == 0 {
            QValue::zero()
        } else {
            self.values[mask as usize - 1].clone()
        }
    }

    fn validate(&self) -> Result<(), PathologyError> {
        let full = 1u32 << self.points.len();
        for a in 1..full {
            let va = self.at(a);
            if va.is_infinite() {
                return Err(PathologyError::NotSubmeasure(format!("infinite value on {}", self.describe(a))));
            }
            for i in 0..self.points.len() {
                let b = a & !(1 << i);
                if b != a && self.at(b) > va {
                    return Err(PathologyError::NotSubmeasure(format!("not monotone at {}", self.describe(a))));
                }
            }
            // subadditivity over all splits A = B ∪ C with B, C disjoint suffices
            let mut b = (a - 1) & a;
            while b > 0 {
                let c = a & !b;
                if b < c {
                    let sum = self.at(b).checked_add(&self.at(c)).expect("finite");
                    if va > sum {
                        return Err(PathologyError::NotSubmeasure(format!("not subadditive at {}", self.describe(a))));
                    }
                }
                b = (b - 1) & a;
            }
        }
        Ok(())
    }

    fn describe(&self, mask: u32) -> String {
        idealkit_core::dsl::set_to_string(&PointSet::subset_by_mask(&self.points, mask as u64, self.sort))
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn ground(&self) -> PointSet {
        PointSet::from_points(self.sort, &self.points).expect("points share the sort")
    }

    pub fn value(&self, set: &PointSet) -> Result<QValue, PathologyError> {
        let mut mask = 0u32;
        for p in set.canonical_points() {
            let i = self
                .points
                .iter()
                .position(|&q| q == p)
                .ok_or_else(|| PathologyError::Invalid(format!("point {p} is outside the table")))?;
            mask |= 1 << i;
        }
        Ok(self.at(mask))
    }

    pub fn to_json(&self) -> Value {
        let rows = (1u32..1 << self.points.len())
            .map(|m| {
                Value::Array(vec![
                    set_to_json(&PointSet::subset_by_mask(&self.points, m as u64, self.sort)),
                    qvalue_to_json(&self.at(m)),
                ])
            })
            .collect();
        object([("ground", set_to_json(&self.ground())), ("values", Value::Array(rows))])
    }

    /// Reads `{"ground":[...],"values":[[set, q], ...]}`; every nonempty
    /// subset of the ground set must be listed exactly once.
    pub fn from_json(v: &Value) -> Result<Self, PathologyError> {
        let json = |e: JsonError| PathologyError::Invalid(e.to_string());
        let ground = set_from_json(field(v, "ground", "$").map_err(json)?, "$.ground", Sort::Nat).map_err(json)?;
        let points = ground.canonical_points();
        if points.is_empty() || points.len() > MAX_TABLE_POINTS {
            return Err(PathologyError::Invalid(format!("a table needs 1..={MAX_TABLE_POINTS} points")));
        }
        let rows = field(v, "values", "$")
            .map_err(json)?
            .as_array()
            .ok_or_else(|| PathologyError::Invalid("$.values: expected an array".into()))?;
        let mut slots: Vec<Option<QValue>> = vec![None; (1 << points.len()) - 1];
        for (k, row) in rows.iter().enumerate() {
            let path = format!("$.values[{k}]");
            let pair = row
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| PathologyError::Invalid(format!("{path}: expected [set, value]")))?;
            let set = set_from_json(&pair[0], &path, ground.sort()).map_err(json)?;
            let q = qvalue_from_json(&pair[1], &path).map_err(json)?;
            let mut mask = 0usize;
            for p in set.canonical_points() {
                let i = points
                    .iter()
                    .position(|&x| x == p)
                    .ok_or_else(|| PathologyError::Invalid(format!("{path}: point {p} is outside the ground set")))?;
                mask |= 1 << i;
            }
            if mask == 0 {
                return Err(PathologyError::Invalid(format!("{path}: empty set")));
            }
            if slots[mask - 1].replace(q).is_some() {
                return Err(PathologyError::Invalid(format!("{path}: duplicate set")));
            }
        }
        if let Some(m) = slots.iter().position(Option::is_none) {
            let missing = PointSet::subset_by_mask(&points, m as u64 + 1, ground.sort());
            return Err(PathologyError::Invalid(format!(
                "no value for {}",
                idealkit_core::dsl::set_to_string(&missing)
            )));
        }
        let table = SubsetTable {
            sort: ground.sort(),
            points,
            values: slots.into_iter().map(Option::unwrap).collect(),
        };
        table.validate()?;
        Ok(table)
    }
}

/// What the envelope is computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Expr(Expr),
    Table(SubsetTable),
}

impl Objective {
    pub fn sort(&self) -> Sort {
        match self {
            Objective::Expr(e) => e.sort(),
            Objective::Table(t) => t.sort(),
        }
    }

    pub fn value(&self, set: &PointSet) -> Result<QValue, PathologyError> {
        match self {
            Objective::Expr(e) => Ok(value(e, set)?),
            Objective::Table(t) => t.value(set),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Objective::Expr(e) => object([("expr", Value::String(e.to_string()))]),
            Objective::Table(t) => object([("table", t.to_json())]),
        }
    }
}

impl From<Expr> for Objective {
    fn from(e: Expr) -> Self {
        Objective::Expr(e)
    }
}

impl From<SubsetTable> for Objective {
    fn from(t: SubsetTable) -> Self {
        Objective::Table(t)
    }
}

/// Three points; singletons and pairs have value 1 and the whole set 2.
pub fn three_point_table() -> SubsetTable {
    let ground = PointSet::Nat([0, 1, 2].into_iter().collect());
    SubsetTable::from_fn(&ground, |m| {
        QValue::Finite(idealkit_core::qvalue::int(if m == 0b111 { 2 } else { 1 }))
    })
    .expect("a submeasure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::qvalue::int;
    use idealkit_core::sets::NatSet;

    #[test]
    fn rejects_non_subadditive() {
        let g = PointSet::Nat(NatSet::from_iter([0, 1]));
        let err = SubsetTable::from_fn(&g, |m| QValue::Finite(int(if m == 3 { 3 } else { 1 }))).unwrap_err();
        assert!(matches!(err, PathologyError::NotSubmeasure(_)));
        let err = SubsetTable::from_fn(&g, |m| QValue::Finite(int(if m == 3 { 1 } else { 2 }))).unwrap_err();
        assert!(matches!(err, PathologyError::NotSubmeasure(_)));
    }

    #[test]
    fn json_round_trip() {
        let t = three_point_table();
        assert_eq!(SubsetTable::from_json(&t.to_json()).unwrap(), t);
        let s = PointSet::Nat(NatSet::from_iter([0, 2]));
        assert_eq!(t.value(&s).unwrap(), QValue::one());
        let mut broken = t.to_json();
        broken["values"].as_array_mut().unwrap().pop();
        assert!(SubsetTable::from_json(&broken).is_err());
    }
}
