use num_bigint::BigInt;
use num_traits::One;

use idealkit_core::error::BuildError;
use idealkit_core::expr::Expr;
use idealkit_core::pairing::pair_encode;
use idealkit_core::qvalue::Rational;
use idealkit_core::sets::{NatSet, Region, Window};

/// The blocks `I_{n,m}` and the submeasures built on them.
#[derive(Clone, Debug)]
pub struct NuExample {
    pub kmax: u64,
    pub mmax: u64,
    /// `etas[n][m] = η_{n,m}`, the normalized counting measure on `I_{n,m}`.
    pub etas: Vec<Vec<Expr>>,
    /// `μ_n = sup_m η_{n,m}`.
    pub mus: Vec<Expr>,
    /// `ν_n`: the largest sum of `n+1` of the `η_{n,m}`.
    pub nus: Vec<Expr>,
}

impl NuExample {
    /// Half-open bounds of `I_{n,m}`. Blocks are laid out consecutively in
    /// `(n, m)` order, `|I_{n,m}| = 2^m`.
    pub fn block(&self, n: u64, m: u64) -> (u64, u64) {
        nu_block(self.mmax, n, m)
    }

    /// First point past the last block.
    pub fn extent(&self) -> u64 {
        nu_block(self.mmax, self.kmax + 1, 0).0
    }
}

fn nu_block(mmax: u64, n: u64, m: u64) -> (u64, u64) {
    let row = (1u64 << (mmax + 1)) - 1;
    let lo = n * row + (1u64 << m) - 1;
    (lo, lo + (1u64 << m))
}

/// Builds `η_{n,m}`, `μ_n` and `ν_n` for `n ≤ kmax`, `m ≤ mmax`.
pub fn build_nu_example(kmax: u64, mmax: u64, window: &Window) -> Result<NuExample, BuildError> {
    if mmax >= 40 || kmax >= 1 << 20 {
        return Err(BuildError::WindowOverflow(format!("kmax {kmax}, mmax {mmax} too large")));
    }
    let need = nu_block(mmax, kmax + 1, 0).0;
    if need > window.bound {
        return Err(BuildError::WindowOverflow(format!(
            "blocks need {need} points, window has {}",
            window.bound
        )));
    }
    let mut etas = Vec::new();
    let mut mus = Vec::new();
    let mut nus = Vec::new();
    for n in 0..=kmax {
        let row = (0..=mmax)
            .map(|m| {
                let (lo, hi) = nu_block(mmax, n, m);
                let size = 1u64 << m;
                Ok(Expr::capped(Rational::new(1.into(), size.into()), size, Region::block(lo, hi)?)?)
            })
            .collect::<Result<Vec<_>, BuildError>>()?;
        mus.push(Expr::sup(row.clone())?);
        nus.push(Expr::topk(n as usize + 1, row.clone())?);
        etas.push(row);
    }
    Ok(NuExample {
        kmax,
        mmax,
        etas,
        mus,
        nus,
    })
}

/// `a_k = 1/(k+2)!`.
pub fn capped_weight(k: u64) -> Rational {
    let fact: BigInt = (2..=k + 2).map(BigInt::from).product();
    Rational::new(BigInt::one(), fact)
}

/// `X_n = {h(n, y) : h(n, y) < W}` for `n ≤ nmax`.
pub fn capped_rows(nmax: u64, window: &Window) -> Vec<NatSet> {
    (0..=nmax)
        .map(|n| {
            (0..)
                .map_while(|y| pair_encode(n, y).ok().filter(|&c| c < window.bound))
                .collect()
        })
        .collect()
}

/// `sup_n a_n min{n+1, |A ∩ X_n|}` over the given rows `X_0, X_1, …`.
pub fn build_capped_example(rows: &[NatSet]) -> Result<Expr, BuildError> {
    if rows.is_empty() {
        return Err(BuildError::invalid("no rows given"));
    }
    for i in 0..rows.len() {
        if rows[i].is_empty() {
            return Err(BuildError::invalid(format!("row X_{i} is empty")));
        }
        for j in i + 1..rows.len() {
            if !rows[i].is_disjoint(&rows[j]) {
                return Err(BuildError::invalid(format!("rows X_{i} and X_{j} overlap")));
            }
        }
    }
    let parts = rows
        .iter()
        .enumerate()
        .map(|(n, x)| Ok(Expr::capped(capped_weight(n as u64), n as u64 + 1, Region::Nat(x.clone()))?))
        .collect::<Result<Vec<_>, BuildError>>()?;
    Ok(Expr::sup(parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::eval::value;
    use idealkit_core::qvalue::{ratio, QValue};
    use idealkit_core::sets::PointSet;

    #[test]
    fn blocks_are_consecutive() {
        let ex = build_nu_example(2, 3, &Window::new(64)).unwrap();
        assert_eq!(ex.block(0, 0), (0, 1));
        assert_eq!(ex.block(0, 3), (7, 15));
        assert_eq!(ex.block(1, 0), (15, 16));
        assert_eq!(ex.extent(), 45);
        assert!(build_nu_example(2, 3, &Window::new(44)).is_err());
    }

    #[test]
    fn nu_two_exceeds_one() {
        let ex = build_nu_example(2, 3, &Window::new(64)).unwrap();
        let mut pts = Vec::new();
        for j in 0..3 {
            let (lo, _) = ex.block(2, 1 + j);
            pts.extend(lo..lo + (1 << j));
        }
        let f = PointSet::Nat(pts.into_iter().collect());
        assert_eq!(value(&ex.nus[2], &f).unwrap(), QValue::Finite(ratio(3, 2)));
        assert_eq!(value(&ex.mus[2], &f).unwrap(), QValue::Finite(ratio(1, 2)));
    }

    #[test]
    fn capped_weights() {
        assert_eq!(capped_weight(1), ratio(1, 6));
        for k in 1..=8 {
            assert!(capped_weight(k - 1) > capped_weight(k) * Rational::from_integer((k + 1).into()));
        }
        let rows = capped_rows(3, &Window::new(32));
        assert_eq!(rows[0].len(), 16);
        assert_eq!(rows[1].iter().take(3).collect::<Vec<_>>(), vec![1, 5, 9]);
        let e = build_capped_example(&rows).unwrap();
        let x1 = PointSet::Nat(rows[1].iter().take(5).collect());
        assert_eq!(value(&e, &x1).unwrap(), QValue::Finite(ratio(1, 3)));
        assert!(build_capped_example(&[NatSet::from_iter([0, 1]), NatSet::from_iter([1])]).is_err());
    }
}
