//! The recursive extraction that shows a sup of finitely supported,
//! equi-density-like submeasures is density-like, run on finite families.

use std::collections::BTreeSet;

use idealkit_constructions::family::DisjointFamily;
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::{QValue, Rational};
use idealkit_core::sets::PointSet;

use crate::error::WitnessError;

/// How `X_{j+1}` is cut out of `X_j \ {i_j}` once new submeasures are
/// touched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Thinning {
    /// Drop every index whose set meets the support of a newly touched `μ_t`.
    #[default]
    DropTouching,
    /// Keep indices in increasing order while every newly touched `μ_t` stays
    /// below `ε/4` on the union of the kept sets.
    ThinToBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionStep {
    /// `i_j`.
    pub index: usize,
    /// `X_j`.
    pub pool: Vec<usize>,
    /// `T^{(j)}`.
    pub touched: Vec<usize>,
    /// `μ_t(F^{(j)} ∪ ⋃_{i∈X_{j+1}} F_i)` for every `t ∈ T^{(j)}`.
    pub values: Vec<(usize, QValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
    /// `X` after the last step.
    pub final_pool: Vec<usize>,
    /// `sup_n μ_n(⋃_j F_{i_j})`.
    pub final_value: QValue,
}

impl SelectionTrace {
    pub fn indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.index).collect()
    }

    /// `X_{j+1}` for step `j`.
    pub fn next_pool(&self, j: usize) -> &[usize] {
        self.steps.get(j + 1).map_or(&self.final_pool, |s| &s.pool)
    }
}

struct Context<'a> {
    family: &'a DisjointFamily,
    mus: &'a [Expr],
    touches: Vec<BTreeSet<usize>>,
}

impl Context<'_> {
    fn union(&self, indices: impl IntoIterator<Item = usize>) -> PointSet {
        let v: Vec<usize> = indices.into_iter().collect();
        self.family.union_of(&v)
    }
}

/// Items (i)–(iii) of one step, checked from scratch.
pub fn check_step(
    trace: &SelectionTrace,
    j: usize,
    family: &DisjointFamily,
    mus: &[Expr],
    epsilon: &Rational,
) -> Result<(), WitnessError> {
    let step = &trace.steps[j];
    if step.pool.first() != Some(&step.index) {
        return Err(WitnessError::Mismatch(format!("step {j}: i_j is not min X_j")));
    }
    let next = trace.next_pool(j);
    if next.iter().any(|i| *i == step.index || !step.pool.contains(i)) {
        return Err(WitnessError::Mismatch(format!("step {j}: X_(j+1) ⊄ X_j \\ {{i_j}}")));
    }
    let half = QValue::Finite(epsilon / Rational::from_integer(2.into()));
    let picked: Vec<usize> = trace.steps[..=j].iter().map(|s| s.index).collect();
    let set = family.union_of(&picked.iter().chain(next).copied().collect::<Vec<_>>());
    for &t in &step.touched {
        let v = value(&mus[t], &set)?;
        if v >= half {
            return Err(WitnessError::Mismatch(format!("step {j}: μ_{t} reaches {v} ≥ ε/2")));
        }
    }
    Ok(())
}

/// Builds `i_j`, `X_j` and `T^{(j)}` until the pool is empty or `target`
/// indices have been picked.
///
/// Requires `μ_n(F_k) < ε/4` for all `n, k`. Every step is checked against
/// items (i)–(iii) before the next one starts.
pub fn greedy_extract(
    family: &DisjointFamily,
    epsilon: &Rational,
    mus: &[Expr],
    policy: Thinning,
    target: Option<usize>,
) -> Result<SelectionTrace, WitnessError> {
    if mus.iter().any(|m| m.sort() != family.sort()) {
        return Err(WitnessError::invalid("submeasures and family have different sorts"));
    }
    if *epsilon <= Rational::from_integer(0.into()) {
        return Err(WitnessError::invalid("ε must be positive"));
    }
    let quarter = QValue::Finite(epsilon / Rational::from_integer(4.into()));
    let supports: Vec<_> = mus.iter().map(Expr::support).collect();
    let mut touches = Vec::with_capacity(family.len());
    for (k, f) in family.members().iter().enumerate() {
        let mut tk = BTreeSet::new();
        for (n, s) in supports.iter().enumerate() {
            if s.meets(f) {
                let v = value(&mus[n], f)?;
                if v >= quarter {
                    return Err(WitnessError::Precondition(format!("μ_{n}(F_{k}) = {v} is not below ε/4")));
                }
                tk.insert(n);
            }
        }
        touches.push(tk);
    }
    let ctx = Context { family, mus, touches };

    let mut pool: Vec<usize> = (0..family.len()).collect();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut trace = SelectionTrace {
        steps: Vec::new(),
        final_pool: Vec::new(),
        final_value: QValue::zero(),
    };
    let mut blocking = None;
    while let Some(&i) = pool.first() {
        if target.is_some_and(|t| trace.steps.len() >= t) {
            break;
        }
        let fresh: Vec<usize> = ctx.touches[i].difference(&touched).copied().collect();
        let rest = &pool[1..];
        let next: Vec<usize> = if fresh.is_empty() {
            rest.to_vec()
        } else {
            let kept = thin(&ctx, rest, &fresh, policy, &quarter)?;
            if kept.len() < rest.len() {
                blocking = fresh.first().copied();
            }
            kept
        };
        touched.extend(ctx.touches[i].iter().copied());
        let picked = trace.indices().into_iter().chain([i]);
        let set = ctx.union(picked.chain(next.iter().copied()));
        let values = touched
            .iter()
            .map(|&t| Ok((t, value(&mus[t], &set)?)))
            .collect::<Result<Vec<_>, WitnessError>>()?;
        trace.steps.push(SelectionStep {
            index: i,
            pool: pool.clone(),
            touched: touched.iter().copied().collect(),
            values,
        });
        trace.final_pool = next.clone();
        check_step(&trace, trace.steps.len() - 1, family, mus, epsilon)?;
        pool = next;
    }
    trace.final_pool = pool;
    let picked = ctx.union(trace.indices());
    trace.final_value = mus.iter().try_fold(QValue::zero(), |acc, m| {
        Ok::<_, WitnessError>(acc.max(value(m, &picked)?))
    })?;
    if let Some(t) = target {
        if trace.steps.len() < t {
            return Err(WitnessError::PoolExhausted {
                picked: trace.indices(),
                blocking,
            });
        }
    }
    Ok(trace)
}

fn thin(
    ctx: &Context<'_>,
    rest: &[usize],
    fresh: &[usize],
    policy: Thinning,
    quarter: &QValue,
) -> Result<Vec<usize>, WitnessError> {
    match policy {
        Thinning::DropTouching => Ok(rest
            .iter()
            .copied()
            .filter(|&i| fresh.iter().all(|t| !ctx.touches[i].contains(t)))
            .collect()),
        Thinning::ThinToBound => {
            let mut kept: Vec<usize> = Vec::new();
            for &i in rest {
                let set = ctx.union(kept.iter().copied().chain([i]));
                let mut ok = true;
                for &t in fresh {
                    if value(&ctx.mus[t], &set)? >= *quarter {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    kept.push(i);
                }
            }
            Ok(kept)
        }
    }
}
