//! Primal simplex for packing problems `max c·x` subject to `x ≥ 0` and
//! `Σ_{i∈V} x_i ≤ b_V` over a list of index masks `V`.
//!
//! The method walks vertices described by `n` active constraints, i.e. the
//! simplex method on the row side, with Bland's rule against cycling. Every
//! step costs one `n×n` inversion and one pass over the constraints, which
//! suits `n ≤ 14` variables and up to `2^14 - 1` constraints.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LpError {
    #[error("problem is unbounded")]
    Unbounded,
    #[error("no convergence after {0} iterations")]
    IterationLimit(usize),
    #[error("active constraint matrix became singular")]
    Singular,
    #[error("invalid problem: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

pub const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Row {
    /// `-x_i ≤ 0`.
    Bound(usize),
    /// `Σ_{i∈mask} x_i ≤ b`.
    Packing(usize),
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for k in 0..2 * n {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn solve_packing(masks: &[u32], b: &[f64], c: &[f64], tolerance: f64) -> Result<LpSolution, LpError> {
    let n = c.len();
    if n == 0 || n > 32 {
        return Err(LpError::Invalid(format!("{n} variables")));
    }
    if masks.len() != b.len() {
        return Err(LpError::Invalid("one bound per constraint is needed".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0)) {
        return Err(LpError::Invalid("bounds must be finite and nonnegative".into()));
    }
    let dot_mask = |mask: u32, v: &[f64]| -> f64 {
        let mut s = 0.0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            s += v[i];
            m &= m - 1;
        }
        s
    };
    let row_vec = |r: Row| -> Vec<f64> {
        match r {
            Row::Bound(i) => (0..n).map(|j| if i == j { -1.0 } else { 0.0 }).collect(),
            Row::Packing(k) => (0..n).map(|j| if masks[k] >> j & 1 == 1 { 1.0 } else { 0.0 }).collect(),
        }
    };
    let rhs = |r: Row| match r {
        Row::Bound(_) => 0.0,
        Row::Packing(k) => b[k],
    };
    let order = |r: Row| match r {
        Row::Bound(i) => i,
        Row::Packing(k) => n + k,
    };

    let mut active: Vec<Row> = (0..n).map(Row::Bound).collect();
    let mut in_active = vec![false; n + masks.len()];
    for i in 0..n {
        in_active[i] = true;
    }
    for it in 0..MAX_ITERATIONS {
        let bmat: Vec<Vec<f64>> = active.iter().map(|&r| row_vec(r)).collect();
        let inv = invert(&bmat).ok_or(LpError::Singular)?;
        let bw: Vec<f64> = active.iter().map(|&r| rhs(r)).collect();
        let x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| inv[i][j] * bw[j]).sum()).collect();
        let lambda: Vec<f64> = (0..n).map(|p| (0..n).map(|i| inv[i][p] * c[i]).sum()).collect();
        let leaving = (0..n)
            .filter(|&p| lambda[p] < -tolerance)
            .min_by_key(|&p| order(active[p]));
        let Some(p) = leaving else {
            let objective = (0..n).map(|i| c[i] * x[i]).sum();
            return Ok(LpSolution { x, objective, iterations: it });
        };
        let d: Vec<f64> = (0..n).map(|i| -inv[i][p]).collect();
        let mut best: Option<(f64, Row)> = None;
        let mut consider = |r: Row, ad: f64, slack: f64| {
            if ad > tolerance {
                let t = slack.max(0.0) / ad;
                let better = match best {
                    None => true,
                    Some((bt, br)) => t < bt - 1e-12 || (t <= bt + 1e-12 && order(r) < order(br)),
                };
                if better {
                    best = Some((t, r));
                }
            }
        };
        for i in 0..n {
            if !in_active[i] {
                consider(Row::Bound(i), -d[i], x[i]);
            }
        }
        for (k, &mask) in masks.iter().enumerate() {
            if !in_active[n + k] {
                consider(Row::Packing(k), dot_mask(mask, &d), b[k] - dot_mask(mask, &x));
            }
        }
        let (_, entering) = best.ok_or(LpError::Unbounded)?;
        in_active[order(active[p])] = false;
        in_active[order(entering)] = true;
        active[p] = entering;
    }
    Err(LpError::IterationLimit(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_pathology() {
        // singletons and pairs bounded by 1, the triple by 2
        let masks: Vec<u32> = (1..8).collect();
        let b: Vec<f64> = masks.iter().map(|m| if *m == 7 { 2.0 } else { 1.0 }).collect();
        let s = solve_packing(&masks, &b, &[1.0, 1.0, 1.0], 1e-12).unwrap();
        assert!((s.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_variable() {
        let s = solve_packing(&[1], &[0.25], &[1.0], 1e-12).unwrap();
        assert_eq!(s.x, vec![0.25]);
        assert_eq!(solve_packing(&[], &[], &[1.0], 1e-12), Err(LpError::Unbounded));
    }

    #[test]
    fn partial_objective() {
        let masks = vec![1, 2, 3];
        let s = solve_packing(&masks, &[1.0, 1.0, 1.5], &[1.0, 0.0], 1e-12).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
