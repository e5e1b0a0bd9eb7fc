use num_traits::One;

use idealkit_core::error::BuildError;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::Rational;
use idealkit_core::sets::{Point, Sort, Window};

/// `φ_f(A) = max_n Σ_{i≤n, i∈A} f(i) / Σ_{i≤n} f(i)` over the indices of `f`.
pub fn erdos_ulam(f: Vec<Rational>) -> Result<Expr, BuildError> {
    Ok(Expr::erdos_ulam(f)?)
}

/// `max_{1≤n≤|g|} |A ∩ n| / g(n)`; `g[j]` is read as `g(j+1)`.
pub fn simple_density(g: Vec<Rational>) -> Result<Expr, BuildError> {
    Ok(Expr::simple_density(g)?)
}

/// The hat submeasure `λ(A) = φ({m : h⁻¹[A] meets row m})`.
///
/// On a finite window every row index reachable by decoding is a natural
/// below the window bound, so the only requirement left is the sort.
pub fn hat(phi: Expr) -> Result<Expr, BuildError> {
    if phi.sort() != Sort::Nat {
        return Err(BuildError::invalid("hat needs a submeasure on ω"));
    }
    Ok(Expr::hat(phi)?)
}

/// Power mean `(Σ a_i φ_i^q)^(1/q)`.
pub fn qmix(q: Rational, terms: Vec<(Rational, Expr)>) -> Result<Expr, BuildError> {
    Ok(Expr::qmix(q, terms)?)
}

/// The 0/1 submeasure on the window: one on every nonempty set.
pub fn nonempty_indicator(window: &Window) -> Expr {
    Expr::capped(
        Rational::one(),
        1,
        idealkit_core::sets::Region::Block {
            lo: 0,
            hi: window.bound.max(1),
        },
    )
    .expect("nonempty block")
}

/// Sup of Dirac measures at every point, and at every even point, of the
/// window.
pub fn dirac_examples(window: &Window) -> (Expr, Expr) {
    let all = (0..window.bound).map(|n| Expr::dirac(Point::Nat(n))).collect();
    let even = (0..window.bound)
        .step_by(2)
        .map(|n| Expr::dirac(Point::Nat(n)))
        .collect();
    (
        Expr::sup(all).expect("nonempty window"),
        Expr::sup(even).expect("nonempty window"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::eval::value;
    use idealkit_core::qvalue::{int, QValue};
    use idealkit_core::sets::{NatSet, PointSet};

    fn nat(xs: &[u64]) -> PointSet {
        PointSet::Nat(xs.iter().copied().collect::<NatSet>())
    }

    #[test]
    fn diracs() {
        let (fin, plus) = dirac_examples(&Window::new(16));
        assert_eq!(value(&fin, &nat(&[5])).unwrap(), QValue::one());
        assert_eq!(value(&plus, &nat(&[1, 3, 5])).unwrap(), QValue::zero());
        assert_eq!(value(&plus, &nat(&[2])).unwrap(), QValue::one());
    }

    #[test]
    fn builders_reject_bad_input() {
        assert!(erdos_ulam(vec![]).is_err());
        assert!(erdos_ulam(vec![int(1), int(0)]).is_err());
        assert!(simple_density(vec![]).is_err());
        let hat_of_grid = Expr::rowlift(Expr::dirac(Point::Nat(0)), 0).unwrap();
        assert!(hat(hat_of_grid).is_err());
    }
}
