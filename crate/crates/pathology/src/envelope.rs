use num_traits::{One, Zero};
use rayon::prelude::*;

use serde_json::Value;

use idealkit_core::json::{float, object, point_to_json, qvalue_to_json, rational_to_json, set_to_json};
use idealkit_core::qvalue::{approximate_f64, exact_from_f64, QValue, Rational};
use idealkit_core::sets::{Point, PointSet};

use crate::error::PathologyError;
use crate::lp::solve_packing;
use crate::objective::Objective;

pub const DEFAULT_SUPPORT_CAP: usize = 14;

/// Denominator bound for the first rounding attempt of the LP optimum.
const SMALL_DENOMINATOR: u64 = 1_000_000;

/// Bits of the rational lower bounds used for root-valued constraints.
const ROOT_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct PathologyReport {
    pub objective: Objective,
    pub target: PointSet,
    pub support: PointSet,
    /// `φ(A)`.
    pub value: QValue,
    /// `η(A)` of the exactly feasible witness.
    pub certified: Rational,
    /// Optimum reported by the LP.
    pub lp: f64,
    /// `φ(A) - certified`; an upper bound when `φ(A)` is irrational.
    pub gap: Rational,
    pub gap_exact: bool,
    pub witness: Vec<(Point, Rational)>,
    pub iterations: usize,
}

/// `φ` on every nonempty subset of a fixed support, indexed by bit mask.
#[derive(Clone, Debug)]
pub struct EnvelopeProblem {
    pub objective: Objective,
    pub support: PointSet,
    points: Vec<Point>,
    exact: Vec<QValue>,
    lower: Vec<Rational>,
    float: Vec<f64>,
}

impl EnvelopeProblem {
    pub fn new(objective: impl Into<Objective>, support: &PointSet, cap: usize) -> Result<Self, PathologyError> {
        let objective = objective.into();
        let n = support.len();
        if n == 0 {
            return Err(PathologyError::Invalid("empty support".into()));
        }
        if n > cap || n > 20 {
            return Err(PathologyError::SupportCap { size: n, cap: cap.min(20) });
        }
        if support.sort() != objective.sort() {
            return Err(PathologyError::Invalid("support and expression have different sorts".into()));
        }
        let points = support.canonical_points();
        let sort = support.sort();
        let exact: Vec<QValue> = (1u64..1 << n)
            .into_par_iter()
            .map(|mask| objective.value(&PointSet::subset_by_mask(&points, mask, sort)))
            .collect::<Result<_, _>>()?;
        if exact.iter().any(QValue::is_infinite) {
            return Err(PathologyError::Invalid("infinite value on the support".into()));
        }
        let lower = exact
            .iter()
            .map(|v| v.rational_bounds(ROOT_BITS).expect("finite").0)
            .collect();
        let float = exact.iter().map(QValue::to_f64).collect();
        Ok(EnvelopeProblem {
            objective,
            support: support.clone(),
            points,
            exact,
            lower,
            float,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `φ(V)` for a nonempty mask.
    pub fn value_of(&self, mask: u32) -> &QValue {
        &self.exact[mask as usize - 1]
    }

    pub fn mask_of(&self, set: &PointSet) -> Result<u32, PathologyError> {
        let mut mask = 0u32;
        for p in set.canonical_points() {
            let i = self
                .points
                .iter()
                .position(|&q| q == p)
                .ok_or_else(|| PathologyError::Invalid(format!("target point {p} is outside the support")))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// Sums of `eta` over every nonempty mask.
    fn subset_sums(&self, eta: &[Rational]) -> Vec<Rational> {
        let full = 1usize << self.len();
        let mut sums = vec![Rational::zero(); full];
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = &sums[mask & (mask - 1)] + &eta[low];
        }
        sums
    }

    /// Exact check of `η(V) ≤ φ(V)` for all `V`; the first violating mask.
    pub fn violation(&self, eta: &[Rational]) -> Option<u32> {
        let sums = self.subset_sums(eta);
        (1..sums.len()).find(|&m| QValue::Finite(sums[m].clone()) > self.exact[m - 1]).map(|m| m as u32)
    }

    /// Scales `eta` down by the least factor that makes it feasible.
    fn restore(&self, mut eta: Vec<Rational>) -> Vec<Rational> {
        let sums = self.subset_sums(&eta);
        let mut factor = Rational::one();
        for m in 1..sums.len() {
            if sums[m] > Rational::zero() {
                let f = &self.lower[m - 1] / &sums[m];
                if f < factor {
                    factor = f;
                }
            }
        }
        if factor < Rational::one() {
            for e in eta.iter_mut() {
                *e *= &factor;
            }
        }
        eta
    }

    /// Maximal `η(A)` over measures `η ≤ φ` on the support.
    pub fn solve(&self, target: &PointSet, tolerance: f64) -> Result<PathologyReport, PathologyError> {
        let n = self.len();
        let target_mask = self.mask_of(target)?;
        let c: Vec<f64> = (0..n).map(|i| (target_mask >> i & 1) as f64).collect();
        let masks: Vec<u32> = (1u32..1 << n).collect();
        let sol = solve_packing(&masks, &self.float, &c, tolerance)?;
        let candidates = [
            sol.x.iter().map(|&v| approximate_f64(v.max(0.0), SMALL_DENOMINATOR)).collect::<Vec<_>>(),
            sol.x.iter().map(|&v| exact_from_f64(v.max(0.0))).collect::<Vec<_>>(),
        ];
        let mut best: Option<(Rational, Vec<Rational>)> = None;
        for cand in candidates {
            let eta = self.restore(cand);
            if self.violation(&eta).is_some() {
                continue;
            }
            let val: Rational = (0..n).filter(|i| target_mask >> i & 1 == 1).map(|i| eta[i].clone()).sum();
            if best.as_ref().is_none_or(|(b, _)| val > *b) {
                best = Some((val, eta));
            }
        }
        let (certified, eta) = best.ok_or_else(|| PathologyError::Certification("no rounding is feasible".into()))?;
        let value = if target_mask == 0 {
            QValue::zero()
        } else {
            self.value_of(target_mask).clone()
        };
        let (upper, gap_exact) = match &value {
            QValue::Finite(r) => (r.clone(), true),
            other => (other.rational_bounds(ROOT_BITS).expect("finite").1, false),
        };
        Ok(PathologyReport {
            objective: self.objective.clone(),
            target: target.clone(),
            support: self.support.clone(),
            value,
            gap: upper - &certified,
            gap_exact,
            certified,
            lp: sol.objective,
            witness: self.points.iter().copied().zip(eta).collect(),
            iterations: sol.iterations,
        })
    }
}

/// One-shot envelope with the default support cap.
pub fn envelope(
    objective: impl Into<Objective>,
    target: &PointSet,
    support: &PointSet,
    tolerance: f64,
) -> Result<PathologyReport, PathologyError> {
    EnvelopeProblem::new(objective, support, DEFAULT_SUPPORT_CAP)?.solve(target, tolerance)
}

impl PathologyReport {
    pub fn to_json(&self) -> Value {
        let witness = self
            .witness
            .iter()
            .map(|(p, w)| Value::Array(vec![point_to_json(*p), rational_to_json(w)]))
            .collect();
        object([
            ("kind", Value::String("pathology".into())),
            ("objective", self.objective.to_json()),
            ("target", set_to_json(&self.target)),
            ("support", set_to_json(&self.support)),
            ("value", qvalue_to_json(&self.value)),
            (
                "envelope",
                object([("certified", rational_to_json(&self.certified)), ("lp", float(self.lp))]),
            ),
            ("gap", rational_to_json(&self.gap)),
            ("gapExact", Value::Bool(self.gap_exact)),
            ("gapMetric", Value::String("value minus certified envelope".into())),
            ("witness", Value::Array(witness)),
        ])
    }
}
