//! Objects behind the tall families of hat ideals: almost disjoint sets from
//! binary branches, the partition `(M_z)` of ω×ω into ever larger row blocks,
//! and the submeasures `ψ_A` built on it.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::dl::{dl_build, DlParts};
use crate::family::DisjointFamily;
use idealkit_core::error::BuildError;
use idealkit_core::expr::Expr;
use idealkit_core::pairing::{h_cmp, pair_decode};
use idealkit_core::qvalue::Rational;
use idealkit_core::sets::{GridSet, NatSet, Region, Sort, Window};

pub const MAX_AD_DEPTH: usize = 63;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdFamily {
    pub seeds: Vec<Vec<bool>>,
    pub depth: usize,
    /// `{enc(b|n) : 1 ≤ n ≤ depth}` per seed.
    pub sets: Vec<NatSet>,
}

impl AdFamily {
    /// Length of the common prefix of the periodic extensions of two seeds,
    /// capped at the depth.
    pub fn common_prefix(&self, i: usize, j: usize) -> usize {
        (0..self.depth)
            .take_while(|&n| bit(&self.seeds[i], n) == bit(&self.seeds[j], n))
            .count()
    }
}

fn bit(seed: &[bool], n: usize) -> bool {
    seed[n % seed.len()]
}

/// Length-then-lex code: the `2^len - 1` shorter strings come first.
pub fn encode_string(bits: &[bool]) -> u64 {
    assert!(bits.len() <= MAX_AD_DEPTH);
    let value = bits.iter().fold(0u64, |v, &b| (v << 1) | b as u64);
    ((1u64 << bits.len()) - 1) + value
}

pub fn parse_seed(text: &str) -> Result<Vec<bool>, BuildError> {
    if text.is_empty() {
        return Err(BuildError::invalid("empty seed"));
    }
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(BuildError::invalid(format!("seed {text:?} is not a binary string"))),
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn ad_family(seeds: &[Vec<bool>], depth: usize) -> Result<AdFamily, BuildError> {
    if depth == 0 || depth > MAX_AD_DEPTH {
        return Err(BuildError::invalid(format!("depth must be in 1..={MAX_AD_DEPTH}")));
    }
    if seeds.is_empty() {
        return Err(BuildError::invalid("no seeds given"));
    }
    if seeds.iter().any(Vec::is_empty) {
        return Err(BuildError::invalid("empty seed"));
    }
    for i in 0..seeds.len() {
        for j in i + 1..seeds.len() {
            let (a, b) = (&seeds[i], &seeds[j]);
            let period = a.len() / gcd(a.len(), b.len()) * b.len();
            if (0..period).all(|n| bit(a, n) == bit(b, n)) {
                return Err(BuildError::invalid(format!("seeds {i} and {j} give the same branch")));
            }
        }
    }
    let sets = seeds
        .iter()
        .map(|seed| {
            let branch: Vec<bool> = (0..depth).map(|n| bit(seed, n)).collect();
            (1..=depth).map(|n| encode_string(&branch[..n])).collect()
        })
        .collect();
    Ok(AdFamily {
        seeds: seeds.to_vec(),
        depth,
        sets,
    })
}

/// `⋃_{n<rows} {n} × (B \ n)`.
pub fn grid_lift(b: &NatSet, rows: u64) -> GridSet {
    (0..rows)
        .flat_map(|n| b.iter().filter(move |&x| x >= n).map(move |x| (n, x)))
        .collect()
}

/// Blocks `M_z` for `z = h⁻¹(0), …, h⁻¹(count-1)`, each a run of columns in
/// row `z.0`, with `m_{h⁻¹(0)} = 1` and
/// `m_{h⁻¹(i+1)} = (i+2) Σ_{j≤i} m_{h⁻¹(j)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MzPartition {
    pub zs: Vec<(u64, u64)>,
    pub sizes: Vec<u64>,
    /// Half-open column range of each block.
    pub columns: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

impl MzPartition {
    pub fn len(&self) -> usize {
        self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }

    pub fn position(&self, z: (u64, u64)) -> Option<usize> {
        self.index.get(&z).copied()
    }

    pub fn block(&self, i: usize) -> GridSet {
        let (lo, hi) = self.columns[i];
        GridSet::row_lift(&NatSet::interval(lo, hi), self.zs[i].0)
    }

    /// Uniform probability measure on the columns of `M_z`, as a submeasure
    /// on ω.
    pub fn column_measure(&self, i: usize) -> Result<Expr, BuildError> {
        let (lo, hi) = self.columns[i];
        let m = self.sizes[i];
        Ok(Expr::capped(Rational::new(1.into(), m.into()), m, Region::block(lo, hi)?)?)
    }

    /// `μ_z` on ω×ω.
    pub fn mu(&self, i: usize) -> Result<Expr, BuildError> {
        Ok(Expr::rowlift(self.column_measure(i)?, self.zs[i].0)?)
    }
}

pub fn mz_partition(count: usize, window: &Window) -> Result<MzPartition, BuildError> {
    let mut zs = Vec::with_capacity(count);
    let mut sizes: Vec<u64> = Vec::with_capacity(count);
    let mut columns = Vec::with_capacity(count);
    let mut next_col: HashMap<u64, u64> = HashMap::new();
    let mut total = 0u64;
    let overflow = |i: usize| BuildError::WindowOverflow(format!("block M_{i} leaves the window"));
    for i in 0..count {
        let size = if i == 0 {
            1
        } else {
            total.checked_mul(i as u64 + 1).ok_or_else(|| overflow(i))?
        };
        let z = pair_decode(i as u64)?;
        let lo = *next_col.get(&z.0).unwrap_or(&0);
        let hi = lo.checked_add(size).ok_or_else(|| overflow(i))?;
        if hi > window.bound || z.0 >= window.bound {
            return Err(overflow(i));
        }
        next_col.insert(z.0, hi);
        total = total.checked_add(size).ok_or_else(|| overflow(i))?;
        zs.push(z);
        sizes.push(size);
        columns.push((lo, hi));
    }
    let index = zs.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    Ok(MzPartition {
        zs,
        sizes,
        columns,
        index,
    })
}

/// `ψ_A = sup_n Σ_{k∈S_n} φ_{A,k} / |S_n|` with
/// `φ_{A,k} = sup_{t ∈ A_(k)} μ_{(k,t)}`.
pub fn build_psi_a(a: &GridSet, part: &MzPartition, blocks: &DisjointFamily) -> Result<Expr, BuildError> {
    if blocks.sort() != Sort::Nat {
        return Err(BuildError::invalid("index blocks must be subsets of ω"));
    }
    let rows = blocks
        .members()
        .iter()
        .filter_map(|b| b.as_nat().and_then(NatSet::max))
        .max()
        .unwrap() as usize
        + 1;
    let mut phis = vec![Expr::zero(Sort::Nat); rows];
    let mut weights = vec![Rational::zero(); rows];
    for block in blocks.members() {
        let block = block.as_nat().unwrap();
        let w = Rational::new(1.into(), (block.len() as u64).into());
        for k in block.iter() {
            let parts = a
                .row(k)
                .iter()
                .map(|t| {
                    let i = part.position((k, t)).ok_or_else(|| {
                        BuildError::invalid(format!("({k} {t}) is not covered by the partition"))
                    })?;
                    part.column_measure(i)
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !parts.is_empty() {
                phis[k as usize] = Expr::sup(parts)?;
            }
            weights[k as usize] = w.clone();
        }
    }
    let parts = DlParts {
        phis,
        q: vec![Rational::from_integer(1.into()); blocks.len()],
        a: weights,
        blocks: blocks.clone(),
    };
    dl_build(&parts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalExhausted {
    pub row: u64,
    pub partial: Vec<(u64, u64)>,
}

impl fmt::Display for TransversalExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no admissible point in row {} inside the window", self.row)
    }
}

impl std::error::Error for TransversalExhausted {}

/// Greedy `x_n` in row `n`, increasing in `h`-order, meeting every `G_k` at
/// most once.
pub fn transversal(
    supports: &[GridSet],
    rows: u64,
    window: &Window,
) -> Result<Vec<(u64, u64)>, TransversalExhausted> {
    let mut owners: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (k, g) in supports.iter().enumerate() {
        for p in g.iter() {
            owners.entry(p).or_default().push(k);
        }
    }
    let mut hit = vec![false; supports.len()];
    let mut xs: Vec<(u64, u64)> = Vec::new();
    for n in 0..rows {
        let pick = (0..window.bound).map(|c| (n, c)).find(|&p| {
            xs.last().is_none_or(|&prev| h_cmp(p, prev).is_gt())
                && owners.get(&p).is_none_or(|ks| ks.iter().all(|&k| !hit[k]))
        });
        match pick {
            Some(p) => {
                for &k in owners.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
                    hit[k] = true;
                }
                xs.push(p);
            }
            None => return Err(TransversalExhausted { row: n, partial: xs }),
        }
    }
    Ok(xs)
}
