//! Reshaping sups of disjointly supported submeasures: interval
//! normalization of supports, blockization along a cut sequence, and the
//! step refinement used for condition D_strong.

use num_traits::One;

use crate::family::{DisjointFamily, Flavor};
use idealkit_core::error::BuildError;
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::{QValue, Rational};
use idealkit_core::sets::{NatSet, Point, PointSet, Region, Sort, Window};

/// Result of [`normalize_supports`].
#[derive(Clone, Debug)]
pub struct Normalized {
    /// The nonempty intervals `V_n`.
    pub intervals: DisjointFamily,
    /// `ν_n = Sup_k Restrict(μ_k, V_n)`, over the `μ_k` meeting `V_n`.
    pub nus: Vec<Expr>,
    /// Input supports `S_n`, as materialized on the window.
    pub supports: Vec<NatSet>,
    /// `j(n)`: least interval index meeting `S_n`; `S_n ⊆ V_j ∪ V_{j+1}`.
    pub j: Vec<usize>,
}

fn materialized_supports(mus: &[Expr], window: &Window) -> Result<Vec<NatSet>, BuildError> {
    mus.iter()
        .enumerate()
        .map(|(i, mu)| {
            if mu.sort() != Sort::Nat {
                return Err(BuildError::invalid(format!("μ_{i} is not a submeasure on ω")));
            }
            let support = mu.support();
            if support.max_coordinate().is_some_and(|m| m >= window.bound) {
                return Err(BuildError::WindowOverflow(format!("support of μ_{i} leaves the window")));
            }
            let s = support.to_point_set(Sort::Nat, window.bound);
            let s = s.as_nat().expect("nat sort").clone();
            if s.is_empty() {
                return Err(BuildError::invalid(format!("μ_{i} has empty support")));
            }
            Ok(s)
        })
        .collect()
}

/// Rebuilds a sup of disjointly supported submeasures over consecutive
/// interval supports.
///
/// The supports must be pairwise disjoint and their union must be the
/// initial segment `[0, max]`; [`pad_supports`] establishes the latter.
pub fn normalize_supports(mus: &[Expr], window: &Window) -> Result<Normalized, BuildError> {
    if mus.is_empty() {
        return Err(BuildError::invalid("no submeasures given"));
    }
    let supports = materialized_supports(mus, window)?;
    let total: usize = supports.iter().map(NatSet::len).sum();
    let union = supports.iter().fold(NatSet::new(), |acc, s| acc.union(s));
    if union.len() != total {
        let (i, j) = first_overlap(&supports);
        return Err(BuildError::invalid(format!("supports of μ_{i} and μ_{j} overlap")));
    }
    let top = union.max().expect("nonempty supports");
    if union.len() as u64 != top + 1 {
        let gap = (0..=top).find(|&x| !union.contains(x)).unwrap();
        return Err(BuildError::invalid(format!(
            "point {gap} is in no support; pad the family first"
        )));
    }

    // T_0 = [0, max S_0]; T_{n+1} = (M_n, max(S_{n+1} ∪ ⋃{S_k : min S_k ≤ M_n})]
    let mut cuts: Vec<(u64, u64)> = vec![(0, supports[0].max().unwrap())];
    let mut reach = cuts[0].1;
    for s in &supports[1..] {
        let hi = supports
            .iter()
            .filter(|sk| sk.min().unwrap() <= reach)
            .map(|sk| sk.max().unwrap())
            .chain(s.max())
            .max()
            .unwrap();
        if hi > reach {
            cuts.push((reach + 1, hi));
            reach = hi;
        }
    }
    debug_assert_eq!(reach, top);

    let intervals = DisjointFamily::nat(cuts.iter().map(|&(lo, hi)| NatSet::interval(lo, hi + 1)).collect(), Flavor::Int)?;
    let nus = cuts
        .iter()
        .map(|&(lo, hi)| {
            let region = Region::block(lo, hi + 1)?;
            let parts = mus
                .iter()
                .zip(&supports)
                .filter(|(_, s)| s.count_in_range(lo, hi + 1) > 0)
                .map(|(mu, _)| Expr::restrict(mu.clone(), region.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Expr::sup(parts)?)
        })
        .collect::<Result<Vec<_>, BuildError>>()?;
    let j = supports
        .iter()
        .map(|s| {
            let m = s.min().unwrap();
            cuts.iter().position(|&(lo, hi)| lo <= m && m <= hi).unwrap()
        })
        .collect();
    Ok(Normalized {
        intervals,
        nus,
        supports,
        j,
    })
}

/// The four postconditions of [`normalize_supports`]: consecutive interval
/// supports covering `[0, max]`, `S_n ⊆ V_{j(n)} ∪ V_{j(n)+1}`,
/// `ν_n(A) = max_k μ_k(A ∩ V_n)`, and `μ_n(A) ≤ ν_{j(n)}(A) + ν_{j(n)+1}(A)`.
/// The last two are checked on the given sample sets.
pub fn check_normalized(mus: &[Expr], out: &Normalized, samples: &[NatSet]) -> Result<(), String> {
    let bounds: Vec<(u64, u64)> = out
        .intervals
        .members()
        .iter()
        .map(|v| {
            let v = v.as_nat().expect("intervals live on ω");
            (v.min().unwrap(), v.max().unwrap())
        })
        .collect();
    let mut next = 0;
    for (n, (v, &(lo, hi))) in out.intervals.members().iter().zip(&bounds).enumerate() {
        if lo != next || !v.as_nat().unwrap().is_interval() {
            return Err(format!("V_{n} is not the interval starting at {next}"));
        }
        next = hi + 1;
    }
    let top = out.supports.iter().filter_map(NatSet::max).max().unwrap_or(0);
    if next != top + 1 {
        return Err(format!("intervals end at {next}, supports at {}", top + 1));
    }
    for (n, (s, &j)) in out.supports.iter().zip(&out.j).enumerate() {
        let hi = bounds.get(j + 1).unwrap_or(&bounds[j]).1;
        if s.min().unwrap() < bounds[j].0 || s.max().unwrap() > hi {
            return Err(format!("S_{n} is not inside V_{j} ∪ V_{}", j + 1));
        }
    }
    let val = |e: &Expr, a: &NatSet| value(e, &PointSet::Nat(a.clone())).map_err(|e| e.to_string());
    for a in samples {
        let nu_vals = out.nus.iter().map(|nu| val(nu, a)).collect::<Result<Vec<_>, _>>()?;
        for (n, &(lo, hi)) in bounds.iter().enumerate() {
            let part = a.filter_range(lo, hi + 1);
            let mut best = QValue::zero();
            for mu in mus {
                best = best.max(val(mu, &part)?);
            }
            if best != nu_vals[n] {
                return Err(format!("ν_{n} is {} but the restricted sup is {best}", nu_vals[n]));
            }
        }
        for (k, mu) in mus.iter().enumerate() {
            let j = out.j[k];
            let bound = match nu_vals.get(j + 1) {
                Some(next) => nu_vals[j].checked_add(next).map_err(|e| e.to_string())?,
                None => nu_vals[j].clone(),
            };
            let v = val(mu, a)?;
            if v > bound {
                return Err(format!("μ_{k} is {v}, above ν_{j} + ν_{} = {bound}", j + 1));
            }
        }
    }
    Ok(())
}

fn first_overlap(supports: &[NatSet]) -> (usize, usize) {
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if !supports[i].is_disjoint(&supports[j]) {
                return (i, j);
            }
        }
    }
    unreachable!("called only when an overlap exists")
}

/// How the points of `[0, target)` outside every support are absorbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Padding {
    /// `μ_0(A) + |A ∩ S^c|`, for a finite complement.
    FiniteComplement,
    /// `μ_n(A) + |A ∩ {x_n}| / (n+1)` with `(x_n)` the increasing
    /// enumeration of the complement; needs at least as many submeasures
    /// as complement points.
    Spread,
}

/// Adds point masses so that the supports cover `[0, target)`.
pub fn pad_supports(mus: &[Expr], target: u64, rule: Padding, window: &Window) -> Result<Vec<Expr>, BuildError> {
    if mus.is_empty() {
        return Err(BuildError::invalid("no submeasures given"));
    }
    let supports = materialized_supports(mus, window)?;
    let union = supports.iter().fold(NatSet::new(), |acc, s| acc.union(s));
    let complement = NatSet::interval(0, target).difference(&union);
    if complement.is_empty() {
        return Ok(mus.to_vec());
    }
    match rule {
        Padding::FiniteComplement => {
            let extra = Expr::measure(Sort::Nat, complement.iter().map(|x| (Point::Nat(x), Rational::one())))?;
            let mut out = mus.to_vec();
            out[0] = Expr::sum(vec![mus[0].clone(), extra])?;
            Ok(out)
        }
        Padding::Spread => {
            if complement.len() > mus.len() {
                return Err(BuildError::invalid(format!(
                    "{} uncovered points but only {} submeasures",
                    complement.len(),
                    mus.len()
                )));
            }
            let mut out = mus.to_vec();
            for (n, x) in complement.iter().enumerate() {
                let w = Rational::new(1.into(), (n as u64 + 1).into());
                let extra = Expr::measure(Sort::Nat, [(Point::Nat(x), w)])?;
                out[n] = Expr::sum(vec![mus[n].clone(), extra])?;
            }
            Ok(out)
        }
    }
}

/// Half-open bounds of `S_0 = [0, s_0]`, `S_{n+1} = (s_n, s_{n+1}]`.
pub fn cut_blocks(s: &[u64]) -> Result<Vec<(u64, u64)>, BuildError> {
    if s.is_empty() {
        return Err(BuildError::invalid("empty cut sequence"));
    }
    if let Some(i) = s.windows(2).position(|w| w[0] >= w[1]) {
        return Err(BuildError::invalid(format!("cut sequence not increasing at index {}", i + 1)));
    }
    let mut lo = 0;
    Ok(s.iter()
        .map(|&x| {
            let b = (lo, x + 1);
            lo = x + 1;
            b
        })
        .collect())
}

/// `μ_n = Restrict(ν, S_n)`.
pub fn blockize(nu: &Expr, s: &[u64]) -> Result<Vec<Expr>, BuildError> {
    if nu.sort() != Sort::Nat {
        return Err(BuildError::invalid("blockize needs a submeasure on ω"));
    }
    cut_blocks(s)?
        .into_iter()
        .map(|(lo, hi)| Ok(Expr::restrict(nu.clone(), Region::block(lo, hi)?)?))
        .collect()
}

/// One entry `(ε_k, δ_k, s^k)` of a refinement schedule.
#[derive(Clone, Debug)]
pub struct ScheduleEntry {
    pub epsilon: Rational,
    pub delta: Rational,
    pub cuts: Vec<u64>,
}

/// Toolkit default `δ_k = min(ε_k, 2^{-k-1}) / 2`.
pub fn default_delta(k: usize, epsilon: &Rational) -> Rational {
    let power = Rational::new(1.into(), num_bigint::BigInt::from(2u8).pow(k as u32 + 1));
    let m = if *epsilon < power { epsilon.clone() } else { power };
    m / Rational::from_integer(2.into())
}

#[derive(Clone, Debug)]
pub struct Refined {
    /// `ν = Sup(φ, ψ)`.
    pub nu: Expr,
    /// The step submeasure `ψ`.
    pub psi: Expr,
    /// Merged cut sequence `s`.
    pub cuts: Vec<u64>,
}

impl Refined {
    /// `δ_m` for the least `m` with `ε_m ≤ ε`, the threshold that makes the
    /// even-indexed unions small.
    pub fn delta_for(schedule: &[ScheduleEntry], epsilon: &Rational) -> Option<(usize, Rational)> {
        schedule
            .iter()
            .position(|e| e.epsilon <= *epsilon)
            .map(|m| (m, schedule[m].delta.clone()))
    }
}

fn check_schedule(schedule: &[ScheduleEntry]) -> Result<(), BuildError> {
    if schedule.is_empty() {
        return Err(BuildError::invalid("empty schedule"));
    }
    for (k, e) in schedule.iter().enumerate() {
        if e.delta <= Rational::from_integer(0.into()) || e.delta >= e.epsilon {
            return Err(BuildError::invalid(format!("need 0 < δ_{k} < ε_{k}")));
        }
        if k > 0 {
            let prev = &schedule[k - 1];
            if e.epsilon >= prev.epsilon {
                return Err(BuildError::invalid(format!("ε must strictly decrease at index {k}")));
            }
            if e.delta >= prev.delta {
                return Err(BuildError::invalid(format!("δ must strictly decrease at index {k}")));
            }
        }
        if e.cuts.is_empty() {
            return Err(BuildError::invalid(format!("cut sequence s^{k} is empty")));
        }
        if e.cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BuildError::invalid(format!("cut sequence s^{k} is not increasing")));
        }
    }
    Ok(())
}

/// Merges the schedule's cut sequences into one `s` such that every window
/// `[s_n, s_{n+1})` holds a point of each `s^m` with `m ≤ n+1`, then builds
/// `ψ(A) = δ_k` for the least block `S_k` met by `A` and `ν = max(φ, ψ)`.
///
/// The merge stops when a cut sequence runs out, when the next cut would
/// leave the window, or when every `δ_k` has been used.
pub fn dstrong_refine(phi: &Expr, schedule: &[ScheduleEntry], window: &Window) -> Result<Refined, BuildError> {
    if phi.sort() != Sort::Nat {
        return Err(BuildError::invalid("refinement needs a submeasure on ω"));
    }
    check_schedule(schedule)?;
    let mut s = vec![schedule[0].cuts[0]];
    if s[0] >= window.bound {
        return Err(BuildError::WindowOverflow("first cut leaves the window".into()));
    }
    while s.len() < schedule.len() {
        let n = s.len() - 1;
        let last = s[n];
        let needed = (n + 1).min(schedule.len() - 1);
        let mut next = None;
        for entry in &schedule[..=needed] {
            match entry.cuts.iter().find(|&&x| x >= last) {
                Some(&x) => next = next.max(Some(x + 1)),
                None => {
                    next = None;
                    break;
                }
            }
        }
        match next {
            Some(x) if x < window.bound => s.push(x),
            _ => break,
        }
    }
    let steps = cut_blocks(&s)?
        .into_iter()
        .zip(schedule)
        .map(|((lo, hi), e)| (e.delta.clone(), lo, hi - 1))
        .collect();
    let psi = Expr::step(steps)?;
    let nu = Expr::sup(vec![phi.clone(), psi.clone()])?;
    Ok(Refined { nu, psi, cuts: s })
}
