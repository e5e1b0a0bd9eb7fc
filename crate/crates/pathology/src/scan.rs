use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use idealkit_core::qvalue::Rational;
use idealkit_core::sets::PointSet;

use crate::envelope::{EnvelopeProblem, PathologyReport, DEFAULT_SUPPORT_CAP};
use crate::error::PathologyError;
use crate::objective::Objective;

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub targets: usize,
    /// The report with the largest gap, the first one on ties.
    pub worst: Option<PathologyReport>,
}

impl ScanReport {
    pub fn max_gap(&self) -> Option<&Rational> {
        self.worst.as_ref().map(|r| &r.gap)
    }
}

/// Target masks: all of them when `count` covers every nonempty subset,
/// otherwise `count` distinct ones drawn from `seed`, in increasing order.
pub fn sample_masks(n: usize, count: usize, seed: u64) -> Vec<u32> {
    let total = (1usize << n) - 1;
    if count >= total {
        return (1..=total as u32).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masks: Vec<u32> = sample(&mut rng, total, count).into_iter().map(|i| i as u32 + 1).collect();
    masks.sort_unstable();
    masks
}

/// Envelopes over sampled targets inside `support`.
pub fn pathology_scan(
    objective: impl Into<Objective>,
    support: &PointSet,
    sample_count: usize,
    tolerance: f64,
    seed: u64,
) -> Result<ScanReport, PathologyError> {
    if sample_count == 0 {
        return Ok(ScanReport { targets: 0, worst: None });
    }
    let problem = EnvelopeProblem::new(objective, support, DEFAULT_SUPPORT_CAP)?;
    let masks = sample_masks(problem.len(), sample_count, seed);
    let sort = support.sort();
    let reports: Vec<PathologyReport> = masks
        .par_iter()
        .map(|&m| problem.solve(&PointSet::subset_by_mask(problem.points(), m as u64, sort), tolerance))
        .collect::<Result<_, _>>()?;
    let targets = reports.len();
    let worst = reports.into_iter().reduce(|best, r| if r.gap > best.gap { r } else { best });
    Ok(ScanReport { targets, worst })
}
