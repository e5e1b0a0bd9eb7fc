//! One line per acceptance criterion, then a nonzero exit if any failed.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use idealkit_constructions::examples::{build_capped_example, build_nu_example, capped_rows, capped_weight};
use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_constructions::normalize::{
    blockize, check_normalized, default_delta, dstrong_refine, normalize_supports, Refined, ScheduleEntry,
};
use idealkit_core::eval::value;
use idealkit_core::expr::Expr;
use idealkit_core::fuzz::{check_triple, random_disjoint_family, random_expr, random_set, FuzzConfig};
use idealkit_core::pairing::{pair_decode, pair_decode_big, pair_encode, pair_encode_big};
use idealkit_core::qvalue::{int, ratio, QValue, Rational};
use idealkit_core::sets::{NatSet, Point, PointSet, Sort, Window};
use idealkit_pathology::{envelope, sample_masks, three_point_table, EnvelopeProblem};
use idealkit_witness::{check_step, greedy_extract, ksf_condition_check, ksf_enumerate, Thinning, Variant};

type Outcome = Result<String, String>;

fn q(r: Rational) -> QValue {
    QValue::Finite(r)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn measure(points: impl IntoIterator<Item = (u64, Rational)>) -> Expr {
    Expr::measure(Sort::Nat, points.into_iter().map(|(p, r)| (Point::Nat(p), r))).unwrap()
}

fn stream(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `ν_n(A)`: the sum of the `n+1` largest ratios `|A ∩ I_{n,m}| / 2^m`.
fn nu_oracle(ex: &idealkit_constructions::NuExample, n: u64, a: &NatSet) -> Rational {
    let mut ratios: Vec<Rational> = (0..=ex.mmax)
        .map(|m| {
            let (lo, hi) = ex.block(n, m);
            ratio(a.iter().filter(|&x| lo <= x && x < hi).count() as i64, 1 << m)
        })
        .collect();
    ratios.sort_by(|x, y| y.cmp(x));
    ratios.into_iter().take(n as usize + 1).sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for k in 1..=4u64 {
        let n = 1u64 << k;
        let mmax = k + n;
        let bound = (n + 1) * ((1u64 << (mmax + 1)) - 1);
        let ex = build_nu_example(n, mmax, &Window::new(bound)).map_err(|e| e.to_string())?;
        let members: Vec<NatSet> = (0..=n)
            .map(|j| {
                let (lo, hi) = ex.block(n, k + j);
                assert_eq!(hi - lo, 1 << (k + j));
                NatSet::interval(lo, lo + (1 << j))
            })
            .collect();
        let member = ratio(1, 1 << k);
        for (j, f) in members.iter().enumerate() {
            let v = value(&ex.nus[n as usize], &PointSet::Nat(f.clone())).map_err(|e| e.to_string())?;
            ensure(v == q(member.clone()) && nu_oracle(&ex, n, f) == member, || format!("k={k}: F_{j} has value {v}"))?;
        }
        // the family has 2^k + 1 members, so the whole family is the only subset
        let all = members.iter().fold(NatSet::new(), |acc, f| acc.union(f));
        let u = value(&ex.nus[n as usize], &PointSet::Nat(all.clone())).map_err(|e| e.to_string())?;
        let bound = ratio(n as i64 + 1, n as i64);
        ensure(u >= q(bound.clone()) && nu_oracle(&ex, n, &all) >= bound && u > QValue::one(), || {
            format!("k={k}: union value {u}")
        })?;
    }
    let suite = idealkit_cli::suites::nu_suite();
    ensure(suite.iter().all(|c| c.passed), || "verify-paper ν suite failed".into())?;
    let t = start.elapsed();
    within(t, Duration::from_secs(10))?;
    Ok(format!("k=1..4 exact, {t:.2?}"))
}

fn factorial(n: u64) -> Rational {
    (1..=n).map(|i| Rational::from_integer(i.into())).product()
}

fn criterion_2() -> Outcome {
    let bound = 1024u64;
    let w = Window::new(bound);
    let rows = capped_rows(8, &w);
    let e = build_capped_example(&rows).map_err(|e| e.to_string())?;
    // X_n read off h(n, y) = 2^n (2y + 1) - 1 directly
    let row = |n: u64| -> Vec<u64> { (0..).map(|y| (1u64 << n) * (2 * y + 1) - 1).take_while(|&c| c < bound).collect() };
    let single = |x: u64| value(&e, &PointSet::Nat(NatSet::from_iter([x]))).unwrap();
    let mut subsets = 0;
    for k in 1..=5u64 {
        let ak = Rational::from_integer(1.into()) / factorial(k + 2);
        ensure(capped_weight(k) == ak, || format!("a_{k} = {}", capped_weight(k)))?;
        let xk = row(k);
        ensure(rows[k as usize].as_slice() == xk.as_slice(), || format!("X_{k} differs"))?;
        for &x in &xk {
            ensure(single(x) == q(ak.clone()), || format!("k={k}: singleton {x}"))?;
        }
        let pool = &xk[..(2 * k as usize + 2).min(xk.len())];
        ensure(pool.len() > k as usize, || format!("k={k}: row too short"))?;
        let want = q(&ak * Rational::from_integer((k + 1).into()));
        for c in combinations(pool.len(), k as usize + 1) {
            let set: NatSet = c.iter().map(|&i| pool[i]).collect();
            ensure(value(&e, &PointSet::Nat(set)).unwrap() == want, || format!("k={k}: subset {c:?}"))?;
            subsets += 1;
        }
        // with δ = a_k no singleton of an earlier row is admissible
        let prev = Rational::from_integer(1.into()) / factorial(k + 1);
        for n in 0..k {
            for x in row(n) {
                let v = single(x);
                ensure(v >= q(prev.clone()) && v > q(ak.clone()), || format!("k={k}: {x} in X_{n} has {v}"))?;
            }
        }
    }
    for k in 1..=8u64 {
        let lhs = Rational::from_integer(1.into()) / factorial(k + 1);
        let rhs = Rational::from_integer((k + 1).into()) / factorial(k + 2);
        ensure(lhs > rhs, || format!("a_{} ≤ {} a_{k}", k - 1, k + 1))?;
    }
    Ok(format!("k=1..5 exact on window {bound}, {subsets} unions, inequality k=1..8"))
}

type Weights = Vec<Vec<(u64, Rational)>>;

fn random_weights(rng: &mut ChaCha8Rng, points: &[u64], count: usize) -> Weights {
    (0..count)
        .map(|_| {
            let mut w = Vec::new();
            for &p in points {
                if rng.gen_bool(0.6) {
                    w.push((p, ratio(rng.gen_range(1..=9), rng.gen_range(1..=7))));
                }
            }
            if w.is_empty() {
                w.push((points[0], int(1)));
            }
            w
        })
        .collect()
}

fn sup_of(weights: &Weights) -> Expr {
    Expr::sup(weights.iter().map(|w| measure(w.iter().cloned())).collect()).unwrap()
}

fn sup_oracle(weights: &Weights, contains: impl Fn(u64) -> bool) -> f64 {
    weights
        .iter()
        .map(|w| w.iter().filter(|(p, _)| contains(*p)).map(|(_, r)| r.to_f64().unwrap()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let t = three_point_table();
    let ground = t.ground();
    let r = envelope(t, &ground, &ground, 1e-12).map_err(|e| e.to_string())?;
    let cert = r.certified.to_f64().unwrap();
    ensure(cert >= 1.5 - 1e-6 && (r.lp - 1.5).abs() <= 1e-9 && r.gap == ratio(1, 2), || {
        format!("three-point: certified {}, lp {}, gap {}", r.certified, r.lp, r.gap)
    })?;

    let mut worst_b = 0.0f64;
    for i in 0..200 {
        let mut rng = stream(31, i);
        let n = rng.gen_range(1..=12);
        let points: Vec<u64> = (0..n).map(|i| 3 * i + rng.gen_range(0..3)).collect();
        let count = rng.gen_range(1..=5);
        let weights = random_weights(&mut rng, &points, count);
        let support = PointSet::Nat(points.iter().copied().collect());
        let r = envelope(sup_of(&weights), &support, &support, 1e-12).map_err(|e| e.to_string())?;
        let oracle = sup_oracle(&weights, |_| true);
        let gap = r.gap.to_f64().unwrap();
        worst_b = worst_b.max(gap).max((oracle - r.certified.to_f64().unwrap()).abs());
    }
    ensure(worst_b <= 1e-9, || format!("sup of measures: gap {worst_b:e}"))?;

    let mut worst_c = 0.0f64;
    for i in 0..50 {
        let mut rng = stream(32, i);
        let rows = rng.gen_range(1..=10u64);
        let ids: Vec<u64> = (0..rows).collect();
        let count = rng.gen_range(1..=4);
        let weights = random_weights(&mut rng, &ids, count);
        let hat = Expr::hat(sup_of(&weights)).unwrap();
        let codes: NatSet = (0..12)
            .map(|_| pair_encode(rng.gen_range(0..rows), rng.gen_range(0..4)).unwrap())
            .collect();
        let pts: Vec<Point> = codes.iter().map(Point::Nat).collect();
        let problem = EnvelopeProblem::new(hat, &PointSet::Nat(codes.clone()), 14).map_err(|e| e.to_string())?;
        for m in sample_masks(pts.len(), 20, i) {
            let target = PointSet::subset_by_mask(&pts, m as u64, Sort::Nat);
            let r = problem.solve(&target, 1e-12).map_err(|e| e.to_string())?;
            // the row of code c is the number of trailing zeros of c + 1
            let met: Vec<u64> = target.as_nat().unwrap().iter().map(|c| (c + 1).trailing_zeros() as u64).collect();
            let oracle = sup_oracle(&weights, |row| met.contains(&row));
            worst_c = worst_c.max((oracle - r.certified.to_f64().unwrap()).abs());
        }
    }
    ensure(worst_c <= 1e-9, || format!("hat transfer: deviation {worst_c:e}"))?;
    let t = start.elapsed();
    within(t, Duration::from_secs(120))?;
    Ok(format!("gap 1/2 at three points, max gap {worst_b:e} over 200 sups, max deviation {worst_c:e} over 50 hats, {t:.2?}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let w = Window::new(64);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for i in 0..500 {
        let bound = rng.gen_range(1..=64);
        let mus = random_disjoint_family(&mut rng, bound);
        let out = normalize_supports(&mus, &w).map_err(|e| format!("family {i}: {e}"))?;
        let samples: Vec<NatSet> = (0..8)
            .map(|_| {
                let p = rng.gen_range(0.05..0.7);
                let mut s = Vec::new();
                for x in 0..bound {
                    if rng.gen_bool(p) {
                        s.push(x);
                    }
                }
                s.into_iter().collect()
            })
            .collect();
        check_normalized(&mus, &out, &samples).map_err(|e| format!("family {i}: {e}"))?;
        // intervals tile [0, bound) in order
        let mut next = 0;
        for v in out.intervals.members() {
            let v = v.as_nat().unwrap();
            ensure(v.min() == Some(next) && v.is_interval(), || format!("family {i}: gap at {next}"))?;
            next = v.max().unwrap() + 1;
        }
        ensure(next <= bound, || format!("family {i}: intervals end at {next}"))?;
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(30))?;
    Ok(format!("500 families, {t:.2?}"))
}

fn criterion_5() -> Outcome {
    let cfg = FuzzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for i in 0..10_000 {
        let sort = if i % 4 == 3 { Sort::Grid } else { Sort::Nat };
        let e = random_expr(&mut rng, &cfg, sort);
        let a = random_set(&mut rng, &cfg, sort);
        let b = random_set(&mut rng, &cfg, sort);
        check_triple(&e, &a, &b).map_err(|m| format!("triple {i}: {m}"))?;
    }
    Ok("10000 triples, 0 failures".into())
}

fn ksf_oracle(s: &[u64], f: &[NatSet], k: &[usize]) -> bool {
    k.windows(2)
        .all(|w| w[0] < w[1] && s.iter().any(|&c| f[w[0]].max().unwrap() <= c && c < f[w[1]].min().unwrap()))
}

fn criterion_6() -> Outcome {
    let mut tuples = 0usize;
    for i in 0..100 {
        let mut rng = stream(61, i);
        let n = rng.gen_range(1..=10);
        let mut sets = Vec::new();
        let mut x = rng.gen_range(0..3);
        for _ in 0..n {
            let len = rng.gen_range(1..=3);
            sets.push(NatSet::interval(x, x + len));
            x += len + rng.gen_range(0..3);
        }
        let s: Vec<u64> = (0..x + 2).filter(|_| rng.gen_bool(0.35)).collect();
        let fam = DisjointFamily::nat(sets.clone(), Flavor::Incr).map_err(|e| e.to_string())?;
        let mut expect = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 1..=4 {
            layer = layer
                .iter()
                .flat_map(|t| {
                    (0..n).map(move |j| {
                        let mut u = t.clone();
                        u.push(j);
                        u
                    })
                })
                .collect();
            tuples += layer.len();
            expect.extend(layer.iter().filter(|t| ksf_oracle(&s, &sets, t)).cloned());
        }
        expect.sort();
        let got = ksf_enumerate(&s, &fam, 4).map_err(|e| e.to_string())?;
        ensure(got == expect, || format!("instance {i}: {} vs {} sequences", got.len(), expect.len()))?;
    }
    Ok(format!("100 instances, {tuples} tuples filtered"))
}

/// One seeded run of refinement, blockization, the K_{s,F} checks and the
/// extraction. Returns the number of selections checked and of steps.
fn dstrong_instance(i: u64) -> Result<(usize, usize), String> {
    let mut rng = stream(71, i);
    let s = |e: idealkit_core::error::BuildError| e.to_string();
    let mut comps = Vec::new();
    let mut ends = Vec::new();
    let mut lo = 0;
    for _ in 0..rng.gen_range(6..=12) {
        let hi = lo + rng.gen_range(2..=8);
        let w: Vec<(u64, Rational)> = (lo..hi).map(|p| (p, ratio(1, rng.gen_range(40..=200)))).collect();
        comps.push(measure(w));
        ends.push(hi - 1);
        lo = hi;
    }
    let top = lo;
    let phi = Expr::sup(comps.clone()).unwrap();
    let schedule: Vec<ScheduleEntry> = (0..8)
        .map(|j| {
            let eps = ratio(1, 2 << j);
            let stride = j % 3 + 1;
            ScheduleEntry {
                delta: default_delta(j, &eps),
                epsilon: eps,
                cuts: ends.iter().step_by(stride).copied().collect(),
            }
        })
        .collect();
    let refined = dstrong_refine(&phi, &schedule, &Window::new(256)).map_err(s)?;
    // a later block of ψ must exist for sets with ν < δ_{m0}
    let m0 = rng.gen_range(0..=3.min(refined.cuts.len().saturating_sub(2)));
    let eps = schedule[m0].epsilon.clone();
    let (m, delta) = Refined::delta_for(&schedule, &eps).ok_or("no δ for ε")?;
    ensure(m == m0, || format!("δ index {m}, expected {m0}"))?;

    let mut members = Vec::new();
    // sets meeting an earlier block of ψ carry at least δ_{m-1}
    let mut x = refined.cuts.get(m).map_or(0, |c| c + 1) + rng.gen_range(0..3);
    while x < top && members.len() < 12 {
        let hi = (x + rng.gen_range(1..=3)).min(top);
        let f = NatSet::interval(x, hi);
        if value(&refined.nu, &PointSet::Nat(f.clone())).unwrap() < q(delta.clone()) {
            members.push(f);
        }
        x = hi + rng.gen_range(0..3);
    }
    if members.is_empty() {
        return Err(format!("instance {i}: no admissible sets below δ = {delta}"));
    }
    let fam = DisjointFamily::nat(members, Flavor::Incr).map_err(s)?;
    let eps_q = q(eps);
    let blocks = Expr::sup(blockize(&refined.nu, &refined.cuts).map_err(s)?).unwrap();
    let runs = [
        (&refined.nu, &refined.cuts, Variant::Even),
        (&blocks, &refined.cuts, Variant::Full),
        (&refined.nu, &schedule[m].cuts, Variant::Full),
    ];
    let mut selections = 0;
    for (expr, cuts, variant) in runs {
        let v = ksf_condition_check(expr, cuts, &fam, &eps_q, 6, variant).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("instance {i}: {variant:?} violation {:?}", v[0]))?;
        selections += ksf_enumerate(cuts, &fam, 6).map_err(|e| e.to_string())?.len();
    }

    // μ_n(F_k) ≤ ν(F_k) < δ, so ε' = 4δ meets the extraction's precondition
    let eps_g = delta * int(4);
    let policy = if i.is_multiple_of(2) { Thinning::DropTouching } else { Thinning::ThinToBound };
    let trace = greedy_extract(&fam, &eps_g, &comps, policy, None).map_err(|e| e.to_string())?;
    for j in 0..trace.steps.len() {
        check_step(&trace, j, &fam, &comps, &eps_g).map_err(|e| format!("instance {i} step {j}: {e}"))?;
    }
    ensure(trace.final_value < q(eps_g), || format!("instance {i}: final value {}", trace.final_value))?;
    Ok((selections, trace.steps.len()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (mut selections, mut steps) = (0, 0);
    for i in 0..100 {
        let (a, b) = dstrong_instance(i)?;
        selections += a;
        steps += b;
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(120))?;
    Ok(format!("100 expressions, {selections} selections with 0 violations, {steps} extraction steps, {t:.2?}"))
}

fn criterion_8() -> Outcome {
    for n in 0..1u64 << 16 {
        let (x, y) = pair_decode(n).map_err(|e| e.to_string())?;
        ensure(pair_encode(x, y).ok() == Some(n), || format!("n = {n}"))?;
    }
    for x in 0..1u64 << 10 {
        for y in 0..1u64 << 10 {
            let h = (BigUint::from(1u8) << x) * BigUint::from(2 * y + 1) - 1u8;
            ensure(pair_encode_big(x, y) == h, || format!("h({x}, {y})"))?;
            ensure(pair_decode_big(&h) == (x, y), || format!("h⁻¹(h({x}, {y}))"))?;
        }
    }
    Ok("n < 2^16 and x, y < 2^10 round-trip".into())
}

fn verify_json(extra: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_idealkit"))
        .args(["verify-paper", "--json", "--seed", "9"])
        .args(extra)
        .env_remove("IDEALKIT_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let a = verify_json(&[])?;
    let b = verify_json(&[])?;
    let c = verify_json(&["--threads", "8"])?;
    ensure(a == b, || "two runs differ".into())?;
    ensure(a == c, || "--threads 8 changes the output".into())?;
    Ok(format!("{} identical bytes across 3 runs", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("nu-example certificates", criterion_1),
        ("capped example", criterion_2),
        ("pathology LP", criterion_3),
        ("support normalization", criterion_4),
        ("submeasure axiom fuzz", criterion_5),
        ("K_{s,F} oracle equivalence", criterion_6),
        ("D_strong pipeline", criterion_7),
        ("pairing bijection", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("criterion {} {name}: PASS ({d})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({e})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
