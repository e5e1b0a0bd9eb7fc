//! Exact evaluation and truncation profiles.

use num_traits::{ToPrimitive, Zero};

use crate::error::{EvalError, ValueError};
use crate::expr::{Expr, Node};
use crate::pairing::row_of;
use crate::qvalue::{QValue, Rational};
use crate::sets::{NatSet, PointSet, Sort, Window};

/// Evaluates `expr` at `set` after checking the sort and the window.
pub fn eval(expr: &Expr, set: &PointSet, window: &Window) -> Result<QValue, EvalError> {
    window.check_set(set)?;
    value(expr, set)
}

/// Evaluates without the window check.
pub fn value(expr: &Expr, set: &PointSet) -> Result<QValue, EvalError> {
    if expr.sort() != set.sort() {
        return Err(EvalError::SortMismatch {
            expr: expr.sort(),
            set: set.sort(),
        });
    }
    if set.is_empty() {
        return Ok(QValue::zero());
    }
    match expr.node() {
        Node::Measure { weights, .. } => {
            let mut total = Rational::zero();
            if weights.len() <= set.len() {
                for (p, w) in weights {
                    if set.contains(*p) {
                        total += w;
                    }
                }
            } else {
                for p in set.canonical_points() {
                    if let Ok(i) = weights.binary_search_by(|(q, _)| q.cmp(&p)) {
                        total += &weights[i].1;
                    }
                }
            }
            Ok(QValue::Finite(total))
        }
        Node::CappedCount { a, cap, block } => {
            let n = block.count_in(set).min(*cap);
            Ok(QValue::Finite(a * Rational::from_integer(n.into())))
        }
        Node::Scale { c, child } => Ok(value(child, set)?.scale(c)?),
        Node::Sum(cs) => cs.iter().try_fold(QValue::zero(), |acc, c| {
            Ok(acc.checked_add(&value(c, set)?)?)
        }),
        Node::Sup(cs) => cs
            .iter()
            .try_fold(QValue::zero(), |acc, c| Ok(acc.max(value(c, set)?))),
        Node::TopKSum { k, children } => {
            let mut vals = children
                .iter()
                .map(|c| value(c, set))
                .collect::<Result<Vec<_>, _>>()?;
            vals.sort_by(|a, b| b.cmp(a));
            vals.iter()
                .take(*k)
                .try_fold(QValue::zero(), |acc, v| Ok(acc.checked_add(v)?))
        }
        Node::QMix { q, terms } => qmix_value(q, terms, set),
        Node::Restrict { child, mask } => value(child, &mask.restrict(set)),
        Node::RowLift { child, row } => {
            let grid = set.as_grid().expect("sort checked");
            value(child, &PointSet::Nat(grid.row(*row)))
        }
        Node::Hat(child) => {
            let nat = set.as_nat().expect("sort checked");
            let rows: NatSet = nat.iter().map(row_of).collect();
            value(child, &PointSet::Nat(rows))
        }
        Node::StepInterval { steps } => {
            let nat = set.as_nat().expect("sort checked");
            let hit = steps
                .iter()
                .find(|(_, lo, hi)| nat.count_in_range(*lo, hi.saturating_add(1)) > 0 || (*hi == u64::MAX && nat.contains(*hi)));
            Ok(hit.map_or_else(QValue::zero, |(d, _, _)| QValue::Finite(d.clone())))
        }
        Node::ErdosUlam { f, prefix } => {
            // the ratio only grows at points of A, so checking those suffices
            let nat = set.as_nat().expect("sort checked");
            let mut acc = Rational::zero();
            let mut best = Rational::zero();
            for a in nat.iter().take_while(|&a| (a as usize) < f.len()) {
                acc += &f[a as usize];
                let r = &acc / &prefix[a as usize];
                if r > best {
                    best = r;
                }
            }
            Ok(QValue::Finite(best))
        }
        Node::SimpleDensity { g } => {
            let nat = set.as_nat().expect("sort checked");
            let mut best = Rational::zero();
            for (rank, a) in nat.iter().enumerate() {
                let Some(gn) = g.get(a as usize) else { break };
                let r = Rational::from_integer((rank as u64 + 1).into()) / gn;
                if r > best {
                    best = r;
                }
            }
            Ok(QValue::Finite(best))
        }
    }
}

fn qmix_value(q: &Rational, terms: &[(Rational, Expr)], set: &PointSet) -> Result<QValue, EvalError> {
    let to_u32 = |n: &num_bigint::BigInt| {
        n.to_u32()
            .ok_or_else(|| ValueError::Inexact(format!("exponent {q} too large")))
    };
    let p = to_u32(q.numer())?;
    let s = to_u32(q.denom())?;
    let mut total = QValue::zero();
    for (a, child) in terms {
        if a.is_zero() {
            continue;
        }
        let v = value(child, set)?;
        let term = v.pow_ratio(p, s)?.scale(a)?;
        total = total.checked_add(&term)?;
    }
    Ok(total.pow_ratio(s, p)?)
}

/// Values `φ(A minus its n canonically smallest points)` for `n = 0..=depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormProfile {
    pub set: PointSet,
    pub values: Vec<QValue>,
}

impl NormProfile {
    /// The last value, an upper bound for the exhaustive norm of the set.
    pub fn tail(&self) -> &QValue {
        self.values.last().expect("profile has at least one value")
    }
}

pub fn norm_profile(expr: &Expr, set: &PointSet, depth: usize, window: &Window) -> Result<NormProfile, EvalError> {
    if depth > set.len() {
        return Err(EvalError::InvalidArgument(format!(
            "depth {depth} exceeds the {} points of the set",
            set.len()
        )));
    }
    window.check_set(set)?;
    let points = set.canonical_points();
    let sort = set.sort();
    let values = (0..=depth)
        .map(|n| {
            let rest = PointSet::from_points(sort, &points[n..]).expect("same sort");
            value(expr, &rest)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NormProfile {
        set: set.clone(),
        values,
    })
}

/// Convenience for grid expressions: evaluates at `{row} × cols`.
pub fn value_on_row(expr: &Expr, row: u64, cols: &NatSet) -> Result<QValue, EvalError> {
    debug_assert_eq!(expr.sort(), Sort::Grid);
    value(expr, &PointSet::Grid(crate::sets::GridSet::row_lift(cols, row)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qvalue::{int, ratio};
    use crate::sets::{GridSet, Point, Region};

    fn nat(xs: &[u64]) -> PointSet {
        PointSet::Nat(xs.iter().copied().collect())
    }

    fn q(n: i64, d: i64) -> QValue {
        QValue::Finite(ratio(n, d))
    }

    #[test]
    fn measure_and_capped() {
        let m = Expr::measure(Sort::Nat, [(Point::Nat(0), ratio(1, 2)), (Point::Nat(3), ratio(1, 4))]).unwrap();
        assert_eq!(value(&m, &nat(&[0, 3])).unwrap(), q(3, 4));
        assert_eq!(value(&m, &nat(&[1, 2, 3, 4, 5, 6, 7])).unwrap(), q(1, 4));
        let c = Expr::capped(ratio(1, 6), 2, Region::block(10, 20).unwrap()).unwrap();
        assert_eq!(value(&c, &nat(&[10, 11, 12, 13, 14])).unwrap(), q(1, 3));
        assert_eq!(value(&c, &nat(&[9])).unwrap(), QValue::zero());
    }

    #[test]
    fn sort_and_window_errors() {
        let m = Expr::dirac(Point::Nat(0));
        let g = PointSet::Grid(GridSet::from_iter([(0, 0)]));
        assert!(matches!(value(&m, &g), Err(EvalError::SortMismatch { .. })));
        assert!(eval(&m, &nat(&[5000]), &Window::default()).is_err());
    }

    #[test]
    fn hat_reads_rows() {
        let phi = Expr::measure(Sort::Nat, [(Point::Nat(0), ratio(1, 2)), (Point::Nat(2), ratio(1, 3))]).unwrap();
        let h = Expr::hat(phi).unwrap();
        // h(0,5)=10, h(2,1)=11, h(2,9)=75
        assert_eq!(value(&h, &nat(&[10, 11, 75])).unwrap(), q(5, 6));
        assert_eq!(value(&h, &nat(&[])).unwrap(), QValue::zero());
    }

    #[test]
    fn qmix_root_form() {
        let d0 = Expr::dirac(Point::Nat(0));
        let d1 = Expr::dirac(Point::Nat(1));
        let e = Expr::qmix(int(2), vec![(ratio(1, 2), d0), (ratio(1, 2), d1)]).unwrap();
        assert_eq!(value(&e, &nat(&[0])).unwrap(), QValue::root(ratio(1, 2), 2).unwrap());
        assert_eq!(value(&e, &nat(&[0, 1])).unwrap(), QValue::one());
    }

    #[test]
    fn step_minimal_index() {
        let s = Expr::step(vec![(ratio(1, 2), 0, 1), (ratio(1, 4), 2, 5), (ratio(1, 8), 6, 6)]).unwrap();
        assert_eq!(value(&s, &nat(&[6, 3])).unwrap(), q(1, 4));
        assert_eq!(value(&s, &nat(&[7])).unwrap(), QValue::zero());
    }

    #[test]
    fn erdos_ulam_and_density() {
        let eu = Expr::erdos_ulam(vec![int(1); 10]).unwrap();
        assert_eq!(value(&eu, &nat(&[0])).unwrap(), QValue::one());
        assert_eq!(value(&eu, &nat(&[2, 3])).unwrap(), q(1, 2));
        let sd = Expr::simple_density((1..=10).map(|n| int(n * n)).collect()).unwrap();
        assert_eq!(value(&sd, &nat(&[0, 1])).unwrap(), QValue::one());
        let lin = Expr::simple_density((1..=10).map(int).collect()).unwrap();
        assert_eq!(value(&lin, &nat(&[0])).unwrap(), QValue::one());
    }

    #[test]
    fn profiles() {
        let m = Expr::measure(Sort::Nat, [(Point::Nat(0), int(1)), (Point::Nat(1), int(1))]).unwrap();
        let p = norm_profile(&m, &nat(&[0, 1]), 2, &Window::default()).unwrap();
        assert_eq!(p.values, vec![QValue::Finite(int(2)), QValue::one(), QValue::zero()]);
        let c = Expr::capped(ratio(1, 2), 1, Region::block(0, 4).unwrap()).unwrap();
        let p = norm_profile(&c, &nat(&[0, 1, 2]), 3, &Window::default()).unwrap();
        assert_eq!(p.values, vec![q(1, 2), q(1, 2), q(1, 2), QValue::zero()]);
        assert!(norm_profile(&c, &nat(&[0]), 2, &Window::default()).is_err());
    }
}
