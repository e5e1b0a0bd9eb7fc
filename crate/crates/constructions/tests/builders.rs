use idealkit_constructions::ad::encode_string;
use idealkit_constructions::dl::erdos_ulam_hat_dl;
use idealkit_constructions::normalize::{check_normalized, cut_blocks};
use idealkit_constructions::*;
use idealkit_core::fuzz::{random_disjoint_family, random_nat_expr, FuzzConfig};
use idealkit_core::pairing::h_cmp;
use idealkit_core::qvalue::{int, ratio};
use idealkit_core::{value, Expr, GridSet, NatSet, Point, PointSet, QValue, Rational, Region, Sort, Window};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_nat(rng: &mut impl Rng, bound: u64) -> NatSet {
    let p = rng.gen_range(0.05..0.5);
    (0..bound).filter(|_| rng.gen_bool(p)).collect()
}

#[test]
fn normalization_postconditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let window = Window::new(64);
    for _ in 0..150 {
        let bound = rng.gen_range(1..=64);
        let mus = random_disjoint_family(&mut rng, bound);
        let out = normalize_supports(&mus, &window).unwrap();
        let samples: Vec<NatSet> = (0..6).map(|_| random_nat(&mut rng, bound)).collect();
        check_normalized(&mus, &out, &samples).unwrap();
        // each ν_n lives on its interval
        for (nu, v) in out.nus.iter().zip(out.intervals.members()) {
            let outside = NatSet::interval(0, bound).difference(v.as_nat().unwrap());
            assert!(value(nu, &PointSet::Nat(outside)).unwrap().is_zero());
        }
    }
}

#[test]
fn padding_closes_gaps() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let window = Window::new(64);
    for _ in 0..60 {
        let mut mus = random_disjoint_family(&mut rng, 40);
        // shift every support right by a few points, leaving holes
        mus = mus
            .into_iter()
            .map(|m| Expr::restrict(m, Region::block(3, 64).unwrap()).unwrap())
            .filter(|m| !m.support().to_point_set(Sort::Nat, 64).is_empty())
            .collect();
        if mus.is_empty() {
            continue;
        }
        assert!(normalize_supports(&mus, &window).is_err());
        let padded = pad_supports(&mus, 40, Padding::FiniteComplement, &window).unwrap();
        let out = normalize_supports(&padded, &window).unwrap();
        check_normalized(&padded, &out, &[random_nat(&mut rng, 40)]).unwrap();
        // the padding never lowers a value
        let a = random_nat(&mut rng, 40);
        for (m, p) in mus.iter().zip(&padded) {
            assert!(value(m, &PointSet::Nat(a.clone())).unwrap() <= value(p, &PointSet::Nat(a.clone())).unwrap());
        }
    }
}

#[test]
fn overlapping_supports_are_rejected() {
    let m = Expr::measure(Sort::Nat, [(Point::Nat(0), int(1)), (Point::Nat(1), int(1))]).unwrap();
    let n = Expr::dirac(Point::Nat(1));
    assert!(normalize_supports(&[m, n], &Window::new(8)).is_err());
}

#[test]
fn blockize_restricts_to_cut_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let cfg = FuzzConfig { bound: 40, rows: 2, depth: 3 };
    for _ in 0..100 {
        let nu = random_nat_expr(&mut rng, &cfg, 3, true);
        let mut cuts: Vec<u64> = (0..40).filter(|_| rng.gen_bool(0.2)).collect();
        cuts.push(45);
        let blocks = blockize(&nu, &cuts).unwrap();
        let bounds = cut_blocks(&cuts).unwrap();
        assert_eq!(bounds[0].0, 0);
        assert!(bounds.windows(2).all(|w| w[0].1 == w[1].0));
        let a = random_nat(&mut rng, 40);
        for (mu, (lo, hi)) in blocks.iter().zip(&bounds) {
            let inside = PointSet::Nat(a.iter().filter(|x| lo <= x && x < hi).collect());
            assert_eq!(value(mu, &PointSet::Nat(a.clone())).unwrap(), value(&nu, &inside).unwrap());
        }
    }
    assert!(blockize(&Expr::zero(Sort::Nat), &[3, 3]).is_err());
}

#[test]
fn refinement_step_and_cut_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let window = Window::new(512);
    for _ in 0..100 {
        let k = rng.gen_range(1..6);
        let schedule: Vec<ScheduleEntry> = (0..k)
            .map(|i| {
                let eps = ratio(1, 1 << i);
                let mut cuts: Vec<u64> = Vec::new();
                let mut x = rng.gen_range(0..10);
                for _ in 0..20 {
                    cuts.push(x);
                    x += rng.gen_range(1..12);
                }
                ScheduleEntry { delta: normalize::default_delta(i, &eps), epsilon: eps, cuts }
            })
            .collect();
        let phi = Expr::zero(Sort::Nat);
        let r = dstrong_refine(&phi, &schedule, &window).unwrap();
        assert!(r.cuts.windows(2).all(|w| w[0] < w[1]));
        for n in 0..r.cuts.len().saturating_sub(1) {
            for entry in schedule.iter().take((n + 2).min(k)) {
                assert!(entry.cuts.iter().any(|&x| r.cuts[n] <= x && x < r.cuts[n + 1]), "window {n}");
            }
        }
        // ψ is δ of the first block met
        let bounds = cut_blocks(&r.cuts).unwrap();
        let a = random_nat(&mut rng, 300);
        let expect = bounds
            .iter()
            .zip(&schedule)
            .find(|((lo, hi), _)| a.iter().any(|x| *lo <= x && x < *hi))
            .map_or(QValue::zero(), |(_, e)| QValue::Finite(e.delta.clone()));
        assert_eq!(value(&r.psi, &PointSet::Nat(a.clone())).unwrap(), expect);
        assert_eq!(value(&r.nu, &PointSet::Nat(a)).unwrap(), expect);
    }
}

#[test]
fn interval_dl_matches_formula() {
    let iota = dl::default_iota(4);
    let (_, psi) = interval_dl(&iota).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let rows = *iota.last().unwrap();
    for _ in 0..200 {
        let cells: GridSet = (0..rows).flat_map(|r| (0..rows).map(move |c| (r, c))).filter(|_| rng.gen_bool(0.1)).collect();
        let mut best = Rational::zero();
        for n in iota.windows(2) {
            let mut sum = Rational::zero();
            for k in n[0]..n[1] {
                let row = cells.row(k);
                let mut d = Rational::zero();
                for m in iota.windows(2) {
                    let hit = row.iter().filter(|&c| m[0] <= c && c < m[1]).count() as i64;
                    d = d.max(ratio(hit, (m[1] - m[0]) as i64));
                }
                sum += d;
            }
            best = best.max(sum / int((n[1] - n[0]) as i64));
        }
        assert_eq!(value(&psi, &PointSet::Grid(cells)).unwrap(), QValue::Finite(best));
    }
}

#[test]
fn erdos_ulam_hat_as_dl() {
    let mus = vec![vec![(0, ratio(1, 2)), (3, ratio(1, 2))], vec![(1, ratio(1, 3)), (2, ratio(2, 3))]];
    let w = Window::new(16);
    let (_, psi) = erdos_ulam_hat_dl(&mus, &w).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..100 {
        let cells: GridSet = (0..4).flat_map(|r| (0..6).map(move |c| (r, c))).filter(|_| rng.gen_bool(0.15)).collect();
        let rows = cells.rows();
        let expect = mus
            .iter()
            .map(|m| m.iter().filter(|(k, _)| rows.contains(*k)).map(|(_, r)| r.clone()).sum::<Rational>())
            .max()
            .unwrap();
        assert_eq!(value(&psi, &PointSet::Grid(cells)).unwrap(), QValue::Finite(expect));
    }
}

#[test]
fn capped_example_values() {
    let w = Window::new(1024);
    let rows = capped_rows(6, &w);
    let phi = build_capped_example(&rows).unwrap();
    for k in 1..=5usize {
        let a = capped_weight(k as u64);
        for &x in rows[k].as_slice().iter().take(10) {
            assert_eq!(value(&phi, &PointSet::Nat(NatSet::from_iter([x]))).unwrap(), QValue::Finite(a.clone()));
        }
        let union: NatSet = rows[k].as_slice().iter().take(k + 1).copied().collect();
        assert_eq!(value(&phi, &PointSet::Nat(union)).unwrap(), QValue::Finite(a * int(k as i64 + 1)));
    }
    for k in 1..=8 {
        assert!(capped_weight(k - 1) > capped_weight(k) * int(k as i64 + 1));
    }
}

#[test]
fn nu_example_members() {
    let ex = build_nu_example(4, 6, &Window::new(1 << 12)).unwrap();
    // n = 2, k = 1: F_j has 2^j points of I_{2,1+j}
    let fam: Vec<NatSet> = (0..3).map(|j| {
        let (lo, _) = ex.block(2, 1 + j);
        NatSet::interval(lo, lo + (1 << j))
    }).collect();
    for f in &fam {
        assert_eq!(value(&ex.nus[2], &PointSet::Nat(f.clone())).unwrap(), QValue::Finite(ratio(1, 2)));
    }
    let all = fam.iter().fold(NatSet::new(), |a, f| a.union(f));
    assert_eq!(value(&ex.nus[2], &PointSet::Nat(all)).unwrap(), QValue::Finite(ratio(3, 2)));
    assert_eq!(ex.extent(), ex.block(5, 0).0);
}

#[test]
fn ad_family_intersections_exhaustive() {
    // every seed of length 1..=4 that is not a repeat of a shorter one
    let mut seeds: Vec<Vec<bool>> = Vec::new();
    for len in 1..=4 {
        for v in 0..1u32 << len {
            let s: Vec<bool> = (0..len).rev().map(|i| v >> i & 1 == 1).collect();
            let primitive = (1..len).filter(|d| len % d == 0).all(|d| (0..len).any(|i| s[i] != s[i % d]));
            if primitive {
                seeds.push(s);
            }
        }
    }
    let depth = 12;
    let fam = ad_family(&seeds, depth).unwrap();
    for i in 0..seeds.len() {
        let branch_i: Vec<bool> = (0..depth).map(|n| seeds[i][n % seeds[i].len()]).collect();
        let codes_i: Vec<u64> = (1..=depth).map(|n| encode_string(&branch_i[..n])).collect();
        assert_eq!(fam.sets[i].as_slice(), codes_i.as_slice());
        for j in i + 1..seeds.len() {
            let branch_j: Vec<bool> = (0..depth).map(|n| seeds[j][n % seeds[j].len()]).collect();
            let common = branch_i.iter().zip(&branch_j).take_while(|(a, b)| a == b).count();
            assert_eq!(fam.sets[i].count_common(&fam.sets[j]), common);
            assert_eq!(fam.common_prefix(i, j), common);
        }
    }
}

#[test]
fn mz_partition_growth_and_disjointness() {
    let p = mz_partition(5, &Window::new(1 << 12)).unwrap();
    for i in 0..p.len() - 1 {
        let earlier: u64 = p.sizes[..=i].iter().sum();
        assert!(p.sizes[i + 1] >= (i as u64 + 2) * earlier);
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            assert_eq!(p.block(i).count_common(&p.block(j)), 0);
        }
        assert_eq!(p.block(i).len() as u64, p.sizes[i]);
    }
}

#[test]
fn transversal_meets_each_support_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..50 {
        let supports: Vec<GridSet> = (0..6)
            .map(|_| (0..8).map(|_| (rng.gen_range(0..5), rng.gen_range(0..12))).collect())
            .collect();
        match transversal(&supports, 5, &Window::new(64)) {
            Ok(xs) => {
                assert_eq!(xs.len(), 5);
                assert!(xs.iter().enumerate().all(|(n, p)| p.0 == n as u64));
                assert!(xs.windows(2).all(|w| h_cmp(w[0], w[1]).is_lt()));
                let x: GridSet = xs.iter().copied().collect();
                assert!(supports.iter().all(|g| g.count_common(&x) <= 1));
            }
            Err(e) => assert!(e.partial.len() < 5),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hat_value_is_value_on_rows(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_nat_expr(&mut rng, &FuzzConfig::default(), 2, true);
        let h = hat(phi.clone()).unwrap();
        let cells: GridSet = (0..6).map(|_| (rng.gen_range(0..8), rng.gen_range(0..30))).collect();
        let coded = PointSet::Nat(cells.encode().unwrap());
        prop_assert_eq!(value(&h, &coded).unwrap(), value(&phi, &PointSet::Nat(cells.rows())).unwrap());
    }

    #[test]
    fn normalize_on_small_windows(seed in any::<u64>(), bound in 1u64..=24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mus = random_disjoint_family(&mut rng, bound);
        let out = normalize_supports(&mus, &Window::new(64)).unwrap();
        let samples: Vec<NatSet> = (0..4).map(|_| random_nat(&mut rng, bound)).collect();
        prop_assert_eq!(check_normalized(&mus, &out, &samples), Ok(()));
    }
}
