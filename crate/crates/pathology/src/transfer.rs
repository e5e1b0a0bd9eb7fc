use num_traits::Zero;

use idealkit_core::dsl::set_to_string;
use idealkit_core::eval::value;
use idealkit_core::expr::{Expr, Node};
use idealkit_core::pairing::pair_encode;
use idealkit_core::qvalue::{QValue, Rational};
use idealkit_core::sets::{GridSet, NatSet, Point, PointSet, Sort};

use crate::error::PathologyError;

/// Largest measure support for which domination is checked exhaustively.
pub const MAX_TRANSFER_SUPPORT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    /// `ψ = Σ_{m∈M} η(m) δ_{h(m, a_m)}`.
    pub psi: Expr,
    /// `(m, a_m)` for every `m ∈ M`, by row.
    pub representatives: Vec<(u64, u64)>,
    /// `ψ(A) = η(M)`.
    pub mass: Rational,
}

fn weights(eta: &Expr) -> Result<&[(Point, Rational)], PathologyError> {
    match eta.node() {
        Node::Measure { sort: Sort::Nat, weights } => Ok(weights),
        _ => Err(PathologyError::Invalid("η must be a measure over ω".into())),
    }
}

/// Checks `m(V) ≤ φ(V)` for every nonempty `V` inside the support of `m`.
fn dominated(weights: &[(Point, Rational)], phi: &Expr) -> Result<(), PathologyError> {
    let n = weights.len();
    if n > MAX_TRANSFER_SUPPORT {
        return Err(PathologyError::SupportCap { size: n, cap: MAX_TRANSFER_SUPPORT });
    }
    let points: Vec<Point> = weights.iter().map(|(p, _)| *p).collect();
    let mut sums = vec![Rational::zero(); 1 << n];
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = &sums[mask & (mask - 1)] + &weights[low].1;
        let v = PointSet::subset_by_mask(&points, mask as u64, Sort::Nat);
        let rhs = value(phi, &v)?;
        if QValue::Finite(sums[mask].clone()) > rhs {
            return Err(PathologyError::NotDominated {
                set: set_to_string(&v),
                lhs: sums[mask].to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    Ok(())
}

/// Moves a measure `η ≤ φ` on rows to a measure `ψ ≤ hat(φ)` on ω with
/// `ψ(A) = η(M)`, `M` being the rows met by `h⁻¹[A]`.
///
/// Each row `m ∈ M` sends its mass to `h(m, a_m)` with `a_m` the least
/// column of `h⁻¹[A]` in that row.
pub fn hat_measure_transfer(eta: &Expr, phi: &Expr, a: &NatSet) -> Result<Transfer, PathologyError> {
    if phi.sort() != Sort::Nat {
        return Err(PathologyError::Invalid("φ must be a submeasure over ω".into()));
    }
    let w = weights(eta)?;
    dominated(w, phi)?;
    let grid = GridSet::decode(a);
    let rows = grid.rows();
    if rows.is_empty() {
        return Err(PathologyError::Invalid("A is empty, so it meets no row".into()));
    }
    let representatives: Vec<(u64, u64)> = rows
        .iter()
        .map(|m| (m, grid.row(m).min().expect("row is met")))
        .collect();
    let mut moved = Vec::new();
    for &(m, col) in &representatives {
        if let Some((_, r)) = w.iter().find(|(p, _)| *p == Point::Nat(m)) {
            let code = pair_encode(m, col).map_err(|e| PathologyError::Invalid(e.to_string()))?;
            moved.push((Point::Nat(code), r.clone()));
        }
    }
    let psi = Expr::measure(Sort::Nat, moved.clone()).map_err(|e| PathologyError::Invalid(e.to_string()))?;
    let hat = Expr::hat(phi.clone()).map_err(|e| PathologyError::Invalid(e.to_string()))?;
    dominated(&moved, &hat)
        .map_err(|e| PathologyError::Mismatch(format!("transferred measure is not below hat(φ): {e}")))?;
    let mass: Rational = moved.iter().map(|(_, r)| r.clone()).sum();
    let psi_a = value(&psi, &PointSet::Nat(a.clone()))?;
    if psi_a != QValue::Finite(mass.clone()) {
        return Err(PathologyError::Mismatch(format!("ψ(A) = {psi_a} differs from η(M) = {mass}")));
    }
    Ok(Transfer { psi, representatives, mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::qvalue::{int, ratio};
    use idealkit_core::sets::Region;

    fn counting() -> Expr {
        Expr::capped(int(1), 1, Region::block(0, 8).unwrap()).unwrap()
    }

    #[test]
    fn single_row() {
        let eta = Expr::measure(Sort::Nat, [(Point::Nat(0), int(1))]).unwrap();
        let code = pair_encode(0, 5).unwrap();
        let t = hat_measure_transfer(&eta, &counting(), &NatSet::from_iter([code])).unwrap();
        assert_eq!(t.psi, Expr::measure(Sort::Nat, [(Point::Nat(code), int(1))]).unwrap());
        assert_eq!(t.mass, int(1));
    }

    #[test]
    fn two_rows_split() {
        let eta = Expr::measure(Sort::Nat, [(Point::Nat(0), ratio(1, 2)), (Point::Nat(2), ratio(1, 2))]).unwrap();
        let a: NatSet = [pair_encode(0, 3).unwrap(), pair_encode(0, 1).unwrap(), pair_encode(2, 4).unwrap()]
            .into_iter()
            .collect();
        let t = hat_measure_transfer(&eta, &counting(), &a).unwrap();
        assert_eq!(t.representatives, vec![(0, 1), (2, 4)]);
        assert_eq!(t.mass, int(1));
    }

    #[test]
    fn guarded_cases() {
        let eta = Expr::measure(Sort::Nat, [(Point::Nat(0), int(1))]).unwrap();
        assert!(hat_measure_transfer(&eta, &counting(), &NatSet::new()).is_err());
        let heavy = Expr::measure(Sort::Nat, [(Point::Nat(0), int(1)), (Point::Nat(1), int(1))]).unwrap();
        let err = hat_measure_transfer(&heavy, &counting(), &NatSet::from_iter([0])).unwrap_err();
        assert!(matches!(err, PathologyError::NotDominated { ref set, .. } if set.contains('0')));
    }
}
