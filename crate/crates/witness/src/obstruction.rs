//! t-uniform obstructions: a family of δ-small disjoint sets all of whose
//! t-element subfamilies have ε-large unions.

use itertools::Itertools;
use rayon::prelude::*;

use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::QValue;
use idealkit_core::sets::{Point, PointSet, Window};

use crate::error::WitnessError;

/// Largest number of t-subsets a single check will enumerate.
pub const MAX_SUBSETS: u64 = 5_000_000;

/// Singletons taken from each component's support by the search.
pub const SINGLETONS_PER_COMPONENT: usize = 64;

/// Whole support pieces up to this size are also search candidates.
pub const MAX_BLOCK_CANDIDATE: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCertificate {
    pub expr: Expr,
    pub family: DisjointFamily,
    pub epsilon: QValue,
    pub delta: QValue,
    pub t: usize,
    pub member_values: Vec<QValue>,
    pub min_union_value: QValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureWitness {
    /// A member whose value is not below δ.
    LargeMember { index: usize, value: QValue },
    /// The first t-subset, in lexicographic order, whose union stays below ε.
    SmallUnion { indices: Vec<usize>, value: QValue },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Certificate(ObstructionCertificate),
    Failure(FailureWitness),
}

impl CheckOutcome {
    pub fn certificate(self) -> Option<ObstructionCertificate> {
        match self {
            CheckOutcome::Certificate(c) => Some(c),
            CheckOutcome::Failure(_) => None,
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

pub fn obstruction_check(
    expr: &Expr,
    family: &DisjointFamily,
    epsilon: &QValue,
    delta: &QValue,
    t: usize,
) -> Result<CheckOutcome, WitnessError> {
    let m = family.len();
    if t == 0 || t > m {
        return Err(WitnessError::invalid(format!("t must be in 1..={m}, got {t}")));
    }
    if family.sort() != expr.sort() {
        return Err(WitnessError::invalid("family and expression have different sorts"));
    }
    if binomial(m as u64, t as u64) > MAX_SUBSETS {
        return Err(WitnessError::ResourceCap(format!("C({m}, {t}) subsets exceed {MAX_SUBSETS}")));
    }
    let member_values = family
        .members()
        .iter()
        .map(|f| value(expr, f))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some((index, v)) = member_values.iter().enumerate().find(|(_, v)| *v >= delta) {
        return Ok(CheckOutcome::Failure(FailureWitness::LargeMember {
            index,
            value: v.clone(),
        }));
    }
    let mut min_union: Option<QValue> = None;
    for indices in (0..m).combinations(t) {
        let v = value(expr, &family.union_of(&indices))?;
        if v < *epsilon {
            return Ok(CheckOutcome::Failure(FailureWitness::SmallUnion { indices, value: v }));
        }
        if min_union.as_ref().is_none_or(|u| v < *u) {
            min_union = Some(v);
        }
    }
    Ok(CheckOutcome::Certificate(ObstructionCertificate {
        expr: expr.clone(),
        family: family.clone(),
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        t,
        member_values,
        min_union_value: min_union.expect("t ≤ m gives at least one subset"),
    }))
}

impl ObstructionCertificate {
    /// Recomputes every value and compares with the stored ones.
    pub fn revalidate(&self) -> Result<(), WitnessError> {
        match obstruction_check(&self.expr, &self.family, &self.epsilon, &self.delta, self.t)? {
            CheckOutcome::Certificate(c) if c == *self => Ok(()),
            CheckOutcome::Certificate(_) => Err(WitnessError::Mismatch("stored values differ".into())),
            CheckOutcome::Failure(f) => Err(WitnessError::Mismatch(format!("{f:?}"))),
        }
    }
}

/// Candidate sets of one component: its first singletons and its small
/// pieces, those with value below δ, ordered by size and then by the
/// canonical order of their points.
fn candidates(
    component: &Expr,
    expr: &Expr,
    delta: &QValue,
    window: &Window,
) -> Result<Vec<PointSet>, WitnessError> {
    let sort = expr.sort();
    let support = component.support();
    let mut singles: Vec<Point> = support
        .pieces
        .iter()
        .flat_map(|p| p.points(window.bound, SINGLETONS_PER_COMPONENT))
        .collect();
    singles.sort();
    singles.dedup();
    singles.truncate(SINGLETONS_PER_COMPONENT);
    let mut sets: Vec<PointSet> = singles
        .into_iter()
        .map(|p| PointSet::from_points(sort, &[p]))
        .collect::<Result<_, _>>()
        .map_err(|e| WitnessError::invalid(e.to_string()))?;
    for piece in &support.pieces {
        let pts = piece.points(window.bound, MAX_BLOCK_CANDIDATE as usize + 1);
        if pts.len() > 1 && pts.len() as u64 <= MAX_BLOCK_CANDIDATE {
            sets.push(PointSet::from_points(sort, &pts).map_err(|e| WitnessError::invalid(e.to_string()))?);
        }
    }
    let mut keyed: Vec<(usize, Vec<Point>, PointSet)> = Vec::new();
    for s in sets {
        if value(expr, &s)? < *delta {
            keyed.push((s.len(), s.canonical_points(), s));
        }
    }
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    Ok(keyed.into_iter().map(|k| k.2).collect())
}

struct Search<'a> {
    expr: &'a Expr,
    pool: &'a [PointSet],
    epsilon: &'a QValue,
    delta: &'a QValue,
    m: usize,
    t: usize,
    budget: u64,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, from: usize) -> Result<Option<ObstructionCertificate>, WitnessError> {
        if self.chosen.len() == self.m {
            if self.budget == 0 {
                return Ok(None);
            }
            self.budget -= 1;
            let members = self.chosen.iter().map(|&i| self.pool[i].clone()).collect();
            let family = DisjointFamily::new(members, Flavor::Disj)?;
            return Ok(obstruction_check(self.expr, &family, self.epsilon, self.delta, self.t)?.certificate());
        }
        for i in from..self.pool.len() {
            if self.budget == 0 || self.pool.len() - i < self.m - self.chosen.len() {
                break;
            }
            if self.chosen.iter().any(|&j| !self.pool[j].is_disjoint(&self.pool[i])) {
                continue;
            }
            self.chosen.push(i);
            let hit = self.run(i + 1)?;
            self.chosen.pop();
            if hit.is_some() {
                return Ok(hit);
            }
        }
        Ok(None)
    }
}

/// Bounded search for an obstruction with `m` members.
///
/// Each top-level `Sup` component contributes its own candidate pool, and
/// `budget` bounds the number of families checked per component. Components
/// are searched concurrently; the hit of the earliest component wins.
pub fn search_obstruction(
    expr: &Expr,
    window: &Window,
    epsilon: &QValue,
    delta: &QValue,
    m: usize,
    t: usize,
    budget: u64,
) -> Result<Option<ObstructionCertificate>, WitnessError> {
    if budget == 0 {
        return Err(WitnessError::invalid("budget must be positive"));
    }
    if t == 0 || t > m {
        return Err(WitnessError::invalid(format!("need m ≥ t ≥ 1, got m = {m}, t = {t}")));
    }
    expr.check_window(window).map_err(idealkit_core::error::BuildError::from)?;
    let components = expr.sup_components();
    let results: Vec<Result<Option<ObstructionCertificate>, WitnessError>> = components
        .par_iter()
        .map(|c| {
            let pool = candidates(c, expr, delta, window)?;
            Search {
                expr,
                pool: &pool,
                epsilon,
                delta,
                m,
                t,
                budget,
                chosen: Vec::new(),
            }
            .run(0)
        })
        .collect();
    for r in results {
        if let Some(c) = r? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Runs [`search_obstruction`] on every expression with shared ε and δ.
#[allow(clippy::too_many_arguments)]
pub fn equi_dl_scan(
    exprs: &[Expr],
    epsilon: &QValue,
    delta: &QValue,
    m: usize,
    t: usize,
    window: &Window,
    budget: u64,
) -> Result<Vec<Option<ObstructionCertificate>>, WitnessError> {
    exprs
        .par_iter()
        .map(|e| search_obstruction(e, window, epsilon, delta, m, t, budget))
        .collect()
}

/// Outcome of [`sdl_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdlOutcome {
    pub passed: bool,
    /// Greedily selected indices.
    pub selected: Vec<usize>,
    /// Value of the union of the selected members.
    pub union_value: QValue,
}

/// Greedy selection under the strongly-density-like threshold `c·ε`: members
/// are taken in order while the union stays below ε. Passes when at least
/// `min(budget, |family|)` members were taken.
pub fn sdl_check(
    expr: &Expr,
    c: &QValue,
    epsilon: &QValue,
    family: &DisjointFamily,
    budget: usize,
) -> Result<SdlOutcome, WitnessError> {
    let threshold = match (c.as_rational(), epsilon.as_rational()) {
        (Some(c), Some(_)) => epsilon.scale(c)?,
        _ => return Err(WitnessError::invalid("c and ε must be rational")),
    };
    for (i, f) in family.members().iter().enumerate() {
        let v = value(expr, f)?;
        if v >= threshold {
            return Err(WitnessError::Precondition(format!(
                "member {i} has value {v}, not below c·ε = {threshold}"
            )));
        }
    }
    let mut selected = Vec::new();
    let mut union = PointSet::empty(family.sort());
    let mut union_value = QValue::zero();
    for (i, f) in family.members().iter().enumerate() {
        if selected.len() >= budget {
            break;
        }
        let cand = union.union(f).map_err(|e| WitnessError::invalid(e.to_string()))?;
        let v = value(expr, &cand)?;
        if v < *epsilon {
            selected.push(i);
            union = cand;
            union_value = v;
        }
    }
    Ok(SdlOutcome {
        passed: selected.len() >= budget.min(family.len()),
        selected,
        union_value,
    })
}
