use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::{ratio, QValue};
use idealkit_core::sets::{GridSet, NatSet, PointSet, Sort, Window};

use crate::error::WitnessError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonGdiWitness {
    /// `F_n`, an increasing family.
    pub f: Vec<NatSet>,
    /// `X = ⋃_n {n} × F_n`.
    pub x: GridSet,
}

/// Greedy `F_0, F_1, …` with `φ_n(F_n) ≥ L/2`, each `{n} × F_n` avoiding
/// every `M_k` that already meets an earlier `{i} × F_i`.
///
/// `F_n` takes consecutive admissible columns starting after `max F_{n-1}`.
pub fn nongdi_witness(
    phis: &[Expr],
    norm_lower_bound: &QValue,
    mu_supports: &[GridSet],
    window: &Window,
) -> Result<NonGdiWitness, WitnessError> {
    if norm_lower_bound.is_zero() {
        return Err(WitnessError::Precondition("the norm lower bound must be positive".into()));
    }
    if phis.iter().any(|p| p.sort() != Sort::Nat) {
        return Err(WitnessError::invalid("every φ_n must be a submeasure on ω"));
    }
    let half = norm_lower_bound.scale(&ratio(1, 2))?;
    let mut blocked = vec![false; mu_supports.len()];
    let mut fs: Vec<NatSet> = Vec::new();
    let mut x = GridSet::new();
    let mut start = 0u64;
    for (n, phi) in phis.iter().enumerate() {
        let row = n as u64;
        let mut cols = Vec::new();
        let mut c = start;
        loop {
            if c >= window.bound || row >= window.bound {
                return Err(WitnessError::WindowExhausted { row: n, partial: fs });
            }
            let forbidden = mu_supports
                .iter()
                .zip(&blocked)
                .any(|(m, &b)| b && m.contains((row, c)));
            if !forbidden {
                cols.push(c);
                let set = PointSet::Nat(cols.iter().copied().collect());
                if value(phi, &set)? >= half {
                    break;
                }
            }
            c += 1;
        }
        let f: NatSet = cols.into_iter().collect();
        let xn = GridSet::row_lift(&f, row);
        for (m, b) in mu_supports.iter().zip(blocked.iter_mut()) {
            if !*b && m.count_common(&xn) > 0 {
                *b = true;
            }
        }
        start = c + 1;
        x = x.union(&xn);
        fs.push(f);
    }
    Ok(NonGdiWitness { f: fs, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::qvalue::int;
    use idealkit_core::sets::Region;

    fn counting(w: u64) -> Expr {
        Expr::capped(int(1), w, Region::block(0, w).unwrap()).unwrap()
    }

    #[test]
    fn unconstrained_rows() {
        let w = Window::new(16);
        let out = nongdi_witness(&[counting(16), counting(16)], &QValue::Finite(int(4)), &[], &w).unwrap();
        assert_eq!(out.f, vec![NatSet::from_iter([0, 1]), NatSet::from_iter([2, 3])]);
        assert_eq!(out.x.len(), 4);
    }

    #[test]
    fn blocked_support_pushes_next_row() {
        let w = Window::new(16);
        let m = GridSet::from_iter([(0, 0), (1, 1), (1, 2)]);
        let out = nongdi_witness(&[counting(16), counting(16)], &QValue::Finite(int(2)), &[m], &w).unwrap();
        assert_eq!(out.f, vec![NatSet::from_iter([0]), NatSet::from_iter([3])]);
    }

    #[test]
    fn exhaustion_reports_partial() {
        let w = Window::new(4);
        let err = nongdi_witness(&[counting(4), counting(4)], &QValue::Finite(int(6)), &[], &w).unwrap_err();
        assert_eq!(err, WitnessError::WindowExhausted { row: 1, partial: vec![NatSet::from_iter([0, 1, 2])] });
    }
}
