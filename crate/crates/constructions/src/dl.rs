//! DL submeasures `ψ(A) = sup_n (Σ_{k∈S_n} a_k φ_k^{q_n}(A_(k)))^{1/q_n}` and
//! the named instances built from them.

use num_traits::{One, Zero};

use crate::basic::nonempty_indicator;
use crate::family::{DisjointFamily, Flavor};
use idealkit_core::error::BuildError;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::{QValue, Rational};
use idealkit_core::sets::{NatSet, Region, Sort, Window};

#[derive(Clone, Debug)]
pub struct DlParts {
    /// `φ_k`, one per row index `k`.
    pub phis: Vec<Expr>,
    /// `q_n`, one per block.
    pub q: Vec<Rational>,
    /// `a_k`, one per row index `k`.
    pub a: Vec<Rational>,
    /// Index blocks `S_n`.
    pub blocks: DisjointFamily,
}

impl DlParts {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.blocks.sort() != Sort::Nat {
            return Err(BuildError::invalid("index blocks must be subsets of ω"));
        }
        if self.q.len() != self.blocks.len() {
            return Err(BuildError::invalid(format!(
                "{} exponents for {} blocks",
                self.q.len(),
                self.blocks.len()
            )));
        }
        if let Some((k, _)) = self.phis.iter().enumerate().find(|(_, p)| p.sort() != Sort::Nat) {
            return Err(BuildError::invalid(format!("φ_{k} is not a submeasure on ω")));
        }
        for (n, block) in self.blocks.members().iter().enumerate() {
            let mut total = Rational::zero();
            for k in block.as_nat().expect("checked sort").iter() {
                let k = k as usize;
                if k >= self.phis.len() || k >= self.a.len() {
                    return Err(BuildError::invalid(format!(
                        "row index {k} in block {n} has no submeasure or weight"
                    )));
                }
                total += &self.a[k];
            }
            if !total.is_one() {
                return Err(BuildError::invalid(format!("weights of block {n} sum to {total}, not 1")));
            }
        }
        Ok(())
    }

    /// `max{a_k^{1/q_n} : k ∈ S_n}` for every block, the quantity whose decay
    /// the tallness criteria ask for. At a finite window this is a reported
    /// assumption, not a checked fact.
    pub fn tallness_profile(&self) -> Result<Vec<QValue>, BuildError> {
        self.validate()?;
        self.blocks
            .members()
            .iter()
            .zip(&self.q)
            .map(|(block, q)| {
                let mut best = QValue::zero();
                for k in block.as_nat().expect("checked sort").iter() {
                    let v = QValue::Finite(self.a[k as usize].clone());
                    let (p, s) = exponent_parts(q)?;
                    best = best.max(v.pow_ratio(s, p)?);
                }
                Ok(best)
            })
            .collect()
    }
}

fn exponent_parts(q: &Rational) -> Result<(u32, u32), BuildError> {
    use num_traits::ToPrimitive;
    let p = q.numer().to_u32().ok_or_else(|| BuildError::invalid("exponent too large"))?;
    let s = q.denom().to_u32().ok_or_else(|| BuildError::invalid("exponent too large"))?;
    Ok((p, s))
}

/// `Sup_n QMix(q_n, [(a_k, RowLift(φ_k, k)) : k ∈ S_n])`.
pub fn dl_build(parts: &DlParts) -> Result<Expr, BuildError> {
    parts.validate()?;
    let parts = parts
        .blocks
        .members()
        .iter()
        .zip(&parts.q)
        .map(|(block, q)| {
            let terms = block
                .as_nat()
                .expect("checked sort")
                .iter()
                .map(|k| {
                    let lifted = Expr::rowlift(parts.phis[k as usize].clone(), k)?;
                    Ok((parts.a[k as usize].clone(), lifted))
                })
                .collect::<Result<Vec<_>, BuildError>>()?;
            Ok(Expr::qmix(q.clone(), terms)?)
        })
        .collect::<Result<Vec<_>, BuildError>>()?;
    Ok(Expr::sup(parts)?)
}

/// Endpoints `ι_0 = 0`, `ι_{n+1} = ι_n + (n+1)` for `count` intervals.
pub fn default_iota(count: usize) -> Vec<u64> {
    let mut iota = vec![0u64];
    for n in 0..count as u64 {
        iota.push(iota.last().unwrap() + n + 1);
    }
    iota
}

/// `S ↦ sup_m |S ∩ I_m| / |I_m|` with `I_m = [ι_m, ι_{m+1})`.
pub fn interval_density(iota: &[u64]) -> Result<Expr, BuildError> {
    let blocks = iota
        .windows(2)
        .map(|w| {
            let len = w[1].checked_sub(w[0]).filter(|&l| l > 0).ok_or_else(|| {
                BuildError::invalid("interval endpoints must strictly increase")
            })?;
            Ok(Expr::capped(Rational::new(1.into(), len.into()), len, Region::block(w[0], w[1])?)?)
        })
        .collect::<Result<Vec<_>, BuildError>>()?;
    Ok(Expr::sup(blocks)?)
}

/// `ψ(A) = sup_n (1/|I_n|) Σ_{k∈I_n} sup_m |A_(k) ∩ I_m| / |I_m|`.
pub fn interval_dl(iota: &[u64]) -> Result<(DlParts, Expr), BuildError> {
    if iota.len() < 2 || iota[0] != 0 {
        return Err(BuildError::invalid("need ι_0 = 0 and at least one interval"));
    }
    let phi = interval_density(iota)?;
    let rows = *iota.last().unwrap() as usize;
    let mut a = vec![Rational::zero(); rows];
    let mut blocks = Vec::new();
    for w in iota.windows(2) {
        let len = w[1] - w[0];
        for k in w[0]..w[1] {
            a[k as usize] = Rational::new(1.into(), len.into());
        }
        blocks.push(NatSet::interval(w[0], w[1]));
    }
    let parts = DlParts {
        phis: vec![phi; rows],
        q: vec![Rational::one(); blocks.len()],
        a,
        blocks: DisjointFamily::nat(blocks, Flavor::Int)?,
    };
    let expr = dl_build(&parts)?;
    Ok((parts, expr))
}

/// DL form of the hat of an Erdős–Ulam ideal: given probability measures
/// `μ_n` with disjoint supports, uses the 0/1 submeasure for every row,
/// `q ≡ 1`, `S_n = supp μ_n` and `a_k = μ_n({k})`.
pub fn erdos_ulam_hat_dl(mus: &[Vec<(u64, Rational)>], window: &Window) -> Result<(DlParts, Expr), BuildError> {
    let rows = mus
        .iter()
        .flat_map(|m| m.iter().map(|(k, _)| *k + 1))
        .max()
        .ok_or_else(|| BuildError::invalid("no measures given"))? as usize;
    let mut a = vec![Rational::zero(); rows];
    let mut blocks = Vec::new();
    for m in mus {
        let block: NatSet = m.iter().map(|(k, _)| *k).collect();
        if block.len() != m.len() {
            return Err(BuildError::invalid("repeated point in a measure"));
        }
        for (k, w) in m {
            a[*k as usize] = w.clone();
        }
        blocks.push(block);
    }
    let parts = DlParts {
        phis: vec![nonempty_indicator(window); rows],
        q: vec![Rational::one(); blocks.len()],
        a,
        blocks: DisjointFamily::nat(blocks, Flavor::Disj)?,
    };
    let expr = dl_build(&parts)?;
    Ok((parts, expr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use idealkit_core::eval::value;
    use idealkit_core::qvalue::{int, ratio};
    use idealkit_core::sets::{GridSet, Point, PointSet};

    fn grid(ps: &[(u64, u64)]) -> PointSet {
        PointSet::Grid(ps.iter().copied().collect::<GridSet>())
    }

    #[test]
    fn single_block_reduction() {
        let parts = DlParts {
            phis: vec![Expr::dirac(Point::Nat(0))],
            q: vec![int(1)],
            a: vec![int(1)],
            blocks: DisjointFamily::nat(vec![NatSet::from_iter([0])], Flavor::Disj).unwrap(),
        };
        let e = dl_build(&parts).unwrap();
        assert_eq!(value(&e, &grid(&[(0, 0)])).unwrap(), QValue::one());
    }

    #[test]
    fn interval_example() {
        let iota = default_iota(3);
        assert_eq!(iota, vec![0, 1, 3, 6]);
        let (_, e) = interval_dl(&iota).unwrap();
        assert_eq!(value(&e, &grid(&[(2, 1), (2, 2)])).unwrap(), QValue::Finite(ratio(1, 2)));
    }

    #[test]
    fn weight_violations() {
        let parts = DlParts {
            phis: vec![Expr::dirac(Point::Nat(0)); 2],
            q: vec![int(1)],
            a: vec![ratio(1, 2), ratio(1, 3)],
            blocks: DisjointFamily::nat(vec![NatSet::from_iter([0, 1])], Flavor::Disj).unwrap(),
        };
        assert!(dl_build(&parts).is_err());
        let parts = DlParts {
            blocks: DisjointFamily::nat(vec![NatSet::from_iter([0, 5])], Flavor::Disj).unwrap(),
            a: vec![ratio(1, 2), ratio(1, 2)],
            ..parts
        };
        assert!(dl_build(&parts).is_err());
    }

    #[test]
    fn tallness_profile_values() {
        let parts = DlParts {
            phis: vec![Expr::dirac(Point::Nat(0)); 2],
            q: vec![int(2)],
            a: vec![ratio(1, 4), ratio(3, 4)],
            blocks: DisjointFamily::nat(vec![NatSet::from_iter([0, 1])], Flavor::Disj).unwrap(),
        };
        let p = parts.tallness_profile().unwrap();
        assert_eq!(p, vec![QValue::root(ratio(3, 4), 2).unwrap()]);
    }
}
