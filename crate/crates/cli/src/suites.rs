//! The bundled suite behind `verify-paper`: the ν example, the capped
//! example, envelope checks and the support normalization checks.
//!
//! Every check is deterministic in the seed. A check that errors counts as
//! failed and carries the error text.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use idealkit_constructions::examples::{build_capped_example, build_nu_example, capped_rows, capped_weight};
use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_constructions::normalize::{check_normalized, normalize_supports};
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::fuzz::random_disjoint_family;
use idealkit_core::json::{object, qvalue_to_json, rational_to_json};
use idealkit_core::qvalue::{int, ratio, QValue, Rational};
use idealkit_core::sets::{GridSet, NatSet, Point, PointSet, Sort, Window};
use idealkit_pathology::{envelope, sample_masks, three_point_table, EnvelopeProblem, DEFAULT_SUPPORT_CAP};
use idealkit_witness::{obstruction_check, CheckOutcome};

/// Pivot tolerance handed to the LP; pass thresholds are separate.
const LP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub detail: Value,
}

impl Check {
    fn from_result(suite: &'static str, name: String, r: Result<(bool, String, Value), String>) -> Check {
        match r {
            Ok((passed, summary, detail)) => Check { suite, name, passed, summary, detail },
            Err(e) => Check {
                suite,
                name,
                passed: false,
                summary: format!("error: {e}"),
                detail: Value::Null,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        object([
            ("kind", Value::from("check")),
            ("suite", Value::from(self.suite)),
            ("name", Value::from(self.name.clone())),
            ("passed", Value::Bool(self.passed)),
            ("summary", Value::from(self.summary.clone())),
            ("detail", self.detail.clone()),
        ])
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn q(r: Rational) -> QValue {
    QValue::Finite(r)
}

fn pow2(k: u64) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(1u64 << k))
}

/// `F_j` = the first `2^j` points of `I_{2^k, k+j}` for `j = 0..=2^k`,
/// checked against `ν_{2^k}` with ε = 1, δ = 2^{1-k}, t = 2^k + 1.
fn nu_check(k: u64) -> Result<(bool, String, Value), String> {
    let n = 1u64 << k;
    let mmax = k + n;
    let bound = (n + 1) * ((1u64 << (mmax + 1)) - 1);
    let ex = build_nu_example(n, mmax, &Window::new(bound)).map_err(err)?;
    let members = (0..=n)
        .map(|j| {
            let (lo, _) = ex.block(n, k + j);
            NatSet::interval(lo, lo + (1 << j))
        })
        .collect();
    let fam = DisjointFamily::nat(members, Flavor::Disj).map_err(err)?;
    let delta = Rational::from_integer(2.into()) / pow2(k);
    let out = obstruction_check(&ex.nus[n as usize], &fam, &q(int(1)), &q(delta), n as usize + 1).map_err(err)?;
    let CheckOutcome::Certificate(cert) = out else {
        return Ok((false, "no certificate".into(), Value::Null));
    };
    let member = q(int(1) / pow2(k));
    let union = q(Rational::from_integer((n + 1).into()) / pow2(k));
    let passed = cert.member_values.iter().all(|v| *v == member)
        && cert.min_union_value == union
        && cert.min_union_value > QValue::one()
        && cert.revalidate().is_ok();
    let summary = format!("{} members of value {member}, union {}", n + 1, cert.min_union_value);
    Ok((passed, summary, cert.to_json()))
}

pub fn nu_suite() -> Vec<Check> {
    (1..=4).map(|k| Check::from_result("nu-example", format!("k={k}"), nu_check(k))).collect()
}

pub const CAPPED_WINDOW: u64 = 1024;

fn capped_check(e: &Expr, rows: &[NatSet], k: u64) -> Result<(bool, String, Value), String> {
    let ak = capped_weight(k);
    let prev = capped_weight(k - 1);
    let row = &rows[k as usize];
    let singles_ok = row.iter().all(|x| value(e, &PointSet::Nat(NatSet::from_iter([x]))).ok() == Some(q(ak.clone())));
    let pool: Vec<NatSet> = row.iter().take(2 * k as usize + 2).map(|x| NatSet::from_iter([x])).collect();
    let pool_len = pool.len();
    let fam = DisjointFamily::nat(pool, Flavor::Disj).map_err(err)?;
    let union = q(&ak * Rational::from_integer((k + 1).into()));
    let out = obstruction_check(e, &fam, &union, &q(prev.clone()), k as usize + 1).map_err(err)?;
    // the least (k+1)-union and the value of the whole pool bracket every union
    let whole = value(e, &fam.union_of(&(0..pool_len).collect::<Vec<_>>())).map_err(err)?;
    let unions_ok = matches!(&out, CheckOutcome::Certificate(c) if c.min_union_value == union) && whole == union;
    // for δ = a_k, singletons of the earlier rows are all too large
    let earlier_ok = rows[..k as usize].iter().flat_map(|x| x.iter()).all(|x| {
        value(e, &PointSet::Nat(NatSet::from_iter([x]))).is_ok_and(|v| v >= q(prev.clone()) && v > q(ak.clone()))
    });
    let detail = object([
        ("k", Value::from(k)),
        ("ak", rational_to_json(&ak)),
        ("rowSize", Value::from(row.len())),
        ("pool", Value::from(pool_len)),
        ("union", qvalue_to_json(&union)),
        ("singletons", Value::Bool(singles_ok)),
        ("unions", Value::Bool(unions_ok)),
        ("earlierRowsLarge", Value::Bool(earlier_ok)),
    ]);
    let summary = format!("singletons {ak}, {}-unions {union}, earlier rows at least {prev}", k + 1);
    Ok((singles_ok && unions_ok && earlier_ok, summary, detail))
}

pub fn capped_suite() -> Vec<Check> {
    let w = Window::new(CAPPED_WINDOW);
    let rows = capped_rows(8, &w);
    let mut out = Vec::new();
    match build_capped_example(&rows) {
        Ok(e) => {
            for k in 1..=5 {
                out.push(Check::from_result("capped-example", format!("k={k}"), capped_check(&e, &rows, k)));
            }
        }
        Err(e) => out.push(Check::from_result("capped-example", "build".into(), Err(err(e)))),
    }
    let gaps: Vec<bool> = (1..=8u64)
        .map(|k| capped_weight(k - 1) > capped_weight(k) * Rational::from_integer((k + 1).into()))
        .collect();
    out.push(Check {
        suite: "capped-example",
        name: "a_(k-1) > (k+1) a_k".into(),
        passed: gaps.iter().all(|&b| b),
        summary: "k = 1..8".into(),
        detail: Value::from(gaps),
    });
    out
}

/// `count` measures on `points`, each point weighted with probability 0.6.
pub fn random_measures(rng: &mut ChaCha8Rng, points: &[u64], count: usize) -> Vec<Expr> {
    (0..count)
        .map(|_| {
            let mut w: Vec<(Point, Rational)> = Vec::new();
            for &p in points {
                if rng.gen_bool(0.6) {
                    w.push((Point::Nat(p), ratio(rng.gen_range(1..=9), rng.gen_range(1..=7))));
                }
            }
            if w.is_empty() {
                w.push((Point::Nat(points[0]), int(1)));
            }
            Expr::measure(Sort::Nat, w).expect("distinct points")
        })
        .collect()
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

fn three_point_check() -> Result<(bool, String, Value), String> {
    let t = three_point_table();
    let ground = t.ground();
    let r = envelope(t, &ground, &ground, LP_TOLERANCE).map_err(err)?;
    let passed = to_f64(&r.certified) >= 1.5 - 1e-6 && (r.lp - 1.5).abs() <= 1e-9 && r.gap == ratio(1, 2);
    Ok((passed, format!("certified {}, gap {}", r.certified, r.gap), r.to_json()))
}

/// Instance `i` of a seeded batch gets its own stream, so batches can run
/// in parallel without changing results.
fn instance_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Largest gap over the full support and three sampled targets.
fn sup_instance(seed: u64, i: u64) -> Result<(Rational, usize), String> {
    let mut rng = instance_rng(seed, i);
    let n = rng.gen_range(1..=12);
    let points: Vec<u64> = (0..n).map(|i| 3 * i + rng.gen_range(0..3)).collect();
    let count = rng.gen_range(1..=5);
    let expr = Expr::sup(random_measures(&mut rng, &points, count)).map_err(err)?;
    let support = PointSet::Nat(points.iter().copied().collect());
    let problem = EnvelopeProblem::new(expr, &support, DEFAULT_SUPPORT_CAP).map_err(err)?;
    let mut masks = sample_masks(problem.len(), 3, rng.gen());
    masks.push(((1u64 << problem.len()) - 1) as u32);
    masks.dedup();
    let mut worst = Rational::from_integer(0.into());
    for &m in &masks {
        let target = PointSet::subset_by_mask(problem.points(), m as u64, Sort::Nat);
        worst = worst.max(problem.solve(&target, LP_TOLERANCE).map_err(err)?.gap);
    }
    Ok((worst, masks.len()))
}

fn sup_gap_check(seed: u64, tolerance: f64) -> Result<(bool, String, Value), String> {
    let results = (0..200u64)
        .into_par_iter()
        .map(|i| sup_instance(seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    let targets: usize = results.iter().map(|r| r.1).sum();
    let worst = results.into_iter().map(|r| r.0).max().unwrap_or_default();
    let passed = to_f64(&worst) <= tolerance;
    let detail = object([
        ("instances", Value::from(200)),
        ("targets", Value::from(targets)),
        ("maxGap", rational_to_json(&worst)),
    ]);
    Ok((passed, format!("200 sups of measures, {targets} targets, largest gap {worst}"), detail))
}

/// Largest distance between the envelope of `hat φ` and its value over 20
/// sampled targets.
fn hat_instance(seed: u64, i: u64) -> Result<(f64, usize), String> {
    let mut rng = instance_rng(seed, i);
    let rows = rng.gen_range(1..=10u64);
    let row_ids: Vec<u64> = (0..rows).collect();
    let count = rng.gen_range(1..=4);
    let phi = Expr::sup(random_measures(&mut rng, &row_ids, count)).map_err(err)?;
    let hat = Expr::hat(phi).map_err(err)?;
    let cells: GridSet = (0..12).map(|_| (rng.gen_range(0..rows), rng.gen_range(0..4))).collect();
    let support = PointSet::Nat(cells.encode().map_err(err)?);
    let problem = EnvelopeProblem::new(hat.clone(), &support, DEFAULT_SUPPORT_CAP).map_err(err)?;
    let masks = sample_masks(problem.len(), 20, rng.gen());
    let mut worst = 0.0f64;
    for &m in &masks {
        let target = PointSet::subset_by_mask(problem.points(), m as u64, Sort::Nat);
        let r = problem.solve(&target, LP_TOLERANCE).map_err(err)?;
        let exact = value(&hat, &target).map_err(err)?.to_f64();
        worst = worst.max((exact - to_f64(&r.certified)).abs()).max((exact - r.lp).abs());
    }
    Ok((worst, masks.len()))
}

fn hat_check(seed: u64, tolerance: f64) -> Result<(bool, String, Value), String> {
    let results = (0..50u64)
        .into_par_iter()
        .map(|i| hat_instance(seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    let targets: usize = results.iter().map(|r| r.1).sum();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let passed = worst <= tolerance;
    let detail = object([
        ("instances", Value::from(50)),
        ("targets", Value::from(targets)),
        ("maxDeviation", idealkit_core::json::float(worst)),
    ]);
    Ok((passed, format!("50 hats of sups, {targets} targets, largest deviation {worst:e}"), detail))
}

pub fn pathology_suite(seed: u64, tolerance: f64) -> Vec<Check> {
    vec![
        Check::from_result("pathology", "three-point".into(), three_point_check()),
        Check::from_result("pathology", "sup-of-measures".into(), sup_gap_check(seed ^ 0x5eed_0001, tolerance)),
        Check::from_result("pathology", "hat-transfer".into(), hat_check(seed ^ 0x5eed_0002, tolerance)),
    ]
}

fn normalization_check(seed: u64) -> Result<(bool, String, Value), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Window::new(64);
    let mut failures = Vec::new();
    for i in 0..500 {
        let bound = rng.gen_range(1..=64);
        let mus = random_disjoint_family(&mut rng, bound);
        let out = normalize_supports(&mus, &w).map_err(err)?;
        let mut samples = Vec::new();
        for _ in 0..6 {
            let p = rng.gen_range(0.05..0.7);
            samples.push((0..bound).filter(|_| rng.gen_bool(p)).collect::<NatSet>());
        }
        if let Err(e) = check_normalized(&mus, &out, &samples) {
            failures.push(Value::from(format!("family {i}: {e}")));
        }
    }
    let passed = failures.is_empty();
    let summary = format!("500 families, {} failures", failures.len());
    Ok((passed, summary, object([("families", Value::from(500)), ("failures", Value::Array(failures))])))
}

pub fn normalization_suite(seed: u64) -> Vec<Check> {
    vec![Check::from_result("normalize", "postconditions".into(), normalization_check(seed ^ 0x5eed_0003))]
}

pub fn verify_all(seed: u64, tolerance: f64) -> Vec<Check> {
    let mut out = nu_suite();
    out.extend(capped_suite());
    out.extend(pathology_suite(seed, tolerance));
    out.extend(normalization_suite(seed));
    out
}
