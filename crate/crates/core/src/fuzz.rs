//! Seeded random expressions and sets for property checks.
//!
//! Values of the generated expressions are always exact: a QMix with
//! `q > 1` appears only below `Sup`, `Scale`, `Restrict`, `Hat` and
//! `RowLift`, never below a node that has to add two values.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::ValueError;
use crate::eval::value;
use crate::expr::Expr;
use crate::qvalue::{ratio, QValue, Rational};
use crate::sets::{GridSet, NatSet, Point, PointSet, Region, Sort};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    /// Points are drawn from `[0, bound)`, grid coordinates from `[0, rows)`
    /// times `[0, bound)`.
    pub bound: u64,
    pub rows: u64,
    pub depth: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { bound: 24, rows: 4, depth: 3 }
    }
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(1..=12), rng.gen_range(1..=6))
}

fn block(rng: &mut impl Rng, bound: u64) -> (u64, u64) {
    let lo = rng.gen_range(0..bound);
    let hi = rng.gen_range(lo + 1..=bound);
    (lo, hi)
}

fn leaf(rng: &mut impl Rng, bound: u64) -> Expr {
    match rng.gen_range(0..6) {
        0 => {
            let n = rng.gen_range(0..=5);
            let mut pts: Vec<u64> = (0..bound).collect();
            pts.shuffle(rng);
            let w: Vec<(Point, Rational)> = pts[..n].iter().map(|&p| (Point::Nat(p), small_rational(rng))).collect();
            Expr::measure(Sort::Nat, w).expect("distinct points")
        }
        1 => {
            let (lo, hi) = block(rng, bound);
            Expr::capped(small_rational(rng), rng.gen_range(1..=4), Region::block(lo, hi).expect("lo < hi"))
                .expect("valid capped count")
        }
        2 => Expr::dirac(Point::Nat(rng.gen_range(0..bound))),
        3 => {
            let mut steps = Vec::new();
            let mut lo = 0;
            let mut d = ratio(rng.gen_range(4..=8), 1);
            while lo < bound && steps.len() < 4 {
                let hi = rng.gen_range(lo..bound.min(lo + 8));
                steps.push((d.clone(), lo, hi));
                d /= Rational::from_integer(rng.gen_range(2..=3).into());
                lo = hi + 1;
            }
            Expr::step(steps).expect("tiling steps")
        }
        4 => {
            let f = (0..bound).map(|_| ratio(1, rng.gen_range(1..=8))).collect();
            Expr::erdos_ulam(f).expect("positive weights")
        }
        _ => {
            let mut g = Vec::new();
            let mut acc = 0i64;
            for _ in 0..rng.gen_range(1..=bound) {
                acc += rng.gen_range(0..=3);
                g.push(ratio(acc.max(1), 1));
            }
            Expr::simple_density(g).expect("nondecreasing")
        }
    }
}

/// A random submeasure on ω. `rooted` allows irrational values.
pub fn random_nat_expr(rng: &mut impl Rng, cfg: &FuzzConfig, depth: u32, rooted: bool) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, cfg.bound);
    }
    let d = depth - 1;
    let arity = rng.gen_range(1..=3);
    match rng.gen_range(0..7) {
        0 => Expr::scale(small_rational(rng), random_nat_expr(rng, cfg, d, rooted)).expect("positive factor"),
        1 => Expr::sum((0..arity).map(|_| random_nat_expr(rng, cfg, d, false)).collect()).expect("one sort"),
        2 => Expr::sup((0..arity).map(|_| random_nat_expr(rng, cfg, d, rooted)).collect()).expect("one sort"),
        3 => {
            // disjoint blocks keep the children's supports apart
            let cut = rng.gen_range(1..cfg.bound);
            let children = vec![
                Expr::restrict(random_nat_expr(rng, cfg, d, false), Region::block(0, cut).unwrap()).unwrap(),
                Expr::restrict(random_nat_expr(rng, cfg, d, false), Region::block(cut, cfg.bound).unwrap()).unwrap(),
            ];
            Expr::topk(rng.gen_range(1..=2), children).expect("disjoint supports")
        }
        4 => {
            let q = if rooted {
                [ratio(1, 1), ratio(2, 1), ratio(3, 2), ratio(3, 1)].choose(rng).unwrap().clone()
            } else {
                ratio(1, 1)
            };
            // φ^q is irrational for fractional q, so such mixes get one term
            let arity = if q.is_integer() { arity } else { 1 };
            let weights: Vec<Rational> = match arity {
                1 => vec![ratio(1, 1)],
                2 => vec![ratio(1, 3), ratio(2, 3)],
                _ => vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)],
            };
            let terms = weights.into_iter().map(|a| (a, random_nat_expr(rng, cfg, d, false))).collect();
            Expr::qmix(q, terms).expect("weights sum to one")
        }
        5 => {
            let (lo, hi) = block(rng, cfg.bound);
            Expr::restrict(random_nat_expr(rng, cfg, d, rooted), Region::block(lo, hi).unwrap()).unwrap()
        }
        _ => Expr::hat(random_nat_expr(rng, cfg, d, rooted)).expect("child over ω"),
    }
}

/// A random submeasure on ω×ω built from lifted rows.
pub fn random_grid_expr(rng: &mut impl Rng, cfg: &FuzzConfig, depth: u32) -> Expr {
    let sup = rng.gen_bool(0.5);
    let rows: Vec<Expr> = (0..rng.gen_range(1..=cfg.rows))
        .map(|_| {
            let child = random_nat_expr(rng, cfg, depth.saturating_sub(1), sup);
            Expr::rowlift(child, rng.gen_range(0..cfg.rows)).expect("child over ω")
        })
        .collect();
    if sup {
        Expr::sup(rows).unwrap()
    } else {
        Expr::sum(rows).unwrap()
    }
}

pub fn random_expr(rng: &mut impl Rng, cfg: &FuzzConfig, sort: Sort) -> Expr {
    match sort {
        Sort::Nat => random_nat_expr(rng, cfg, cfg.depth, true),
        Sort::Grid => random_grid_expr(rng, cfg, cfg.depth),
    }
}

pub fn random_set(rng: &mut impl Rng, cfg: &FuzzConfig, sort: Sort) -> PointSet {
    let p = rng.gen_range(0.0..0.6);
    match sort {
        Sort::Nat => PointSet::Nat((0..cfg.bound).filter(|_| rng.gen_bool(p)).collect::<NatSet>()),
        Sort::Grid => PointSet::Grid(
            (0..cfg.rows)
                .flat_map(|r| (0..cfg.bound).map(move |c| (r, c)))
                .filter(|_| rng.gen_bool(p / 2.0))
                .collect::<GridSet>(),
        ),
    }
}

/// Submeasures on ω whose supports partition a random initial segment of
/// `[0, bound)`. Each is a measure, a capped count or a sup of the two.
pub fn random_disjoint_family(rng: &mut impl Rng, bound: u64) -> Vec<Expr> {
    let top = rng.gen_range(1..=bound);
    let count = rng.gen_range(1..=top.min(8)) as usize;
    let mut owners: Vec<Vec<u64>> = vec![Vec::new(); count];
    for (i, owner) in owners.iter_mut().enumerate() {
        owner.push(i as u64);
    }
    for x in count as u64..top {
        owners[rng.gen_range(0..count)].push(x);
    }
    owners.shuffle(rng);
    owners
        .into_iter()
        .map(|pts| {
            let set: NatSet = pts.iter().copied().collect();
            let weights: Vec<(Point, Rational)> =
                pts.iter().map(|&p| (Point::Nat(p), ratio(rng.gen_range(1..=6), 8))).collect();
            let measure = Expr::measure(Sort::Nat, weights).expect("distinct points");
            let capped = Expr::capped(ratio(1, rng.gen_range(1..=4)), rng.gen_range(1..=3), Region::Nat(set))
                .expect("nonempty region");
            match rng.gen_range(0..3) {
                0 => measure,
                1 => capped,
                _ => Expr::sup(vec![measure, capped]).expect("one sort"),
            }
        })
        .collect()
}

/// Whether `lhs ≤ a + b`, with `None` when interval bounds cannot decide.
pub fn le_sum(lhs: &QValue, a: &QValue, b: &QValue) -> Option<bool> {
    match a.checked_add(b) {
        Ok(sum) => Some(lhs.cmp(&sum) != Ordering::Greater),
        Err(ValueError::Inexact(_)) => {
            let bits = 96;
            let (lo, hi) = lhs.rational_bounds(bits)?;
            let (alo, ahi) = a.rational_bounds(bits)?;
            let (blo, bhi) = b.rational_bounds(bits)?;
            if hi <= &alo + &blo {
                Some(true)
            } else if lo > ahi + bhi {
                Some(false)
            } else {
                // a = α·lhs and b = β·lhs with α, β rational decides ties exactly
                let alpha = a.rational_quotient(lhs)?;
                let beta = b.rational_quotient(lhs)?;
                Some(alpha + beta >= Rational::from_integer(1.into()))
            }
        }
        Err(_) => None,
    }
}

/// Checks `φ(∅) = 0`, `φ(A) ≤ φ(A ∪ B)` and `φ(A ∪ B) ≤ φ(A) + φ(B)`.
pub fn check_triple(expr: &Expr, a: &PointSet, b: &PointSet) -> Result<(), String> {
    let eval = |s: &PointSet| value(expr, s).map_err(|e| format!("{expr}: {e}"));
    let empty = eval(&PointSet::empty(expr.sort()))?;
    if !empty.is_zero() {
        return Err(format!("{expr}: value {empty} on the empty set"));
    }
    let u = a.union(b).map_err(|e| e.to_string())?;
    let (va, vb, vu) = (eval(a)?, eval(b)?, eval(&u)?);
    if va > vu || vb > vu {
        return Err(format!("{expr}: not monotone, {va} or {vb} above {vu}"));
    }
    match le_sum(&vu, &va, &vb) {
        Some(true) => Ok(()),
        Some(false) => Err(format!("{expr}: {vu} > {va} + {vb}")),
        None => Err(format!("{expr}: cannot decide {vu} ≤ {va} + {vb}")),
    }
}
