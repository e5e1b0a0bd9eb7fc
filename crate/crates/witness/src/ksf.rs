use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::qvalue::QValue;

use crate::error::WitnessError;

/// Which union of a selection `(k_0, k_1, …)` is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Variant {
    /// `⋃_n F_{k_n}`.
    #[default]
    Full,
    /// `⋃_n F_{k_{2n}}`.
    Even,
}

fn bounds(f: &DisjointFamily) -> Result<Vec<(u64, u64)>, WitnessError> {
    if f.flavor() == Flavor::Disj {
        return Err(WitnessError::invalid("K_{s,F} needs an increasing family"));
    }
    Ok(f.members()
        .iter()
        .map(|m| {
            let s = m.as_nat().expect("increasing families live on ω");
            (s.min().unwrap(), s.max().unwrap())
        })
        .collect())
}

/// Some `s_m` with `max F_a ≤ s_m < min F_b`.
fn separated(s: &[u64], a: (u64, u64), b: (u64, u64)) -> bool {
    let i = s.partition_point(|&x| x < a.1);
    i < s.len() && s[i] < b.0
}

fn check_cuts(s: &[u64]) -> Result<(), WitnessError> {
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WitnessError::invalid("cut sequence s is not strictly increasing"));
    }
    Ok(())
}

/// Membership of a strictly increasing index sequence in `K_{s,F}`.
pub fn ksf_member(s: &[u64], f: &DisjointFamily, k: &[usize]) -> Result<bool, WitnessError> {
    check_cuts(s)?;
    let b = bounds(f)?;
    if k.iter().any(|&i| i >= b.len()) {
        return Err(WitnessError::invalid("index out of range"));
    }
    if k.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(false);
    }
    Ok(k.windows(2).all(|w| separated(s, b[w[0]], b[w[1]])))
}

/// Every sequence in `K_{s,F}` of length `1..=maxlen`, in lexicographic order.
pub fn ksf_enumerate(s: &[u64], f: &DisjointFamily, maxlen: usize) -> Result<Vec<Vec<usize>>, WitnessError> {
    check_cuts(s)?;
    let b = bounds(f)?;
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn walk(
        s: &[u64],
        b: &[(u64, u64)],
        maxlen: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let from = stack.last().map_or(0, |&l| l + 1);
        for i in from..b.len() {
            if let Some(&l) = stack.last() {
                if !separated(s, b[l], b[i]) {
                    continue;
                }
            }
            stack.push(i);
            out.push(stack.clone());
            if stack.len() < maxlen {
                walk(s, b, maxlen, stack, out);
            }
            stack.pop();
        }
    }
    if maxlen > 0 {
        walk(s, &b, maxlen, &mut stack, &mut out);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub selection: Vec<usize>,
    pub value: QValue,
}

/// Selections of `K_{s,F}` up to `maxlen` whose measured union reaches ε.
pub fn ksf_condition_check(
    expr: &Expr,
    s: &[u64],
    f: &DisjointFamily,
    epsilon: &QValue,
    maxlen: usize,
    variant: Variant,
) -> Result<Vec<Violation>, WitnessError> {
    let mut out = Vec::new();
    for sel in ksf_enumerate(s, f, maxlen)? {
        let used: Vec<usize> = match variant {
            Variant::Full => sel.clone(),
            Variant::Even => sel.iter().step_by(2).copied().collect(),
        };
        let v = value(expr, &f.union_of(&used))?;
        if v >= *epsilon {
            out.push(Violation { selection: sel, value: v });
        }
    }
    Ok(out)
}
