use std::path::Path;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use idealkit_constructions::ad::{ad_family, mz_partition, parse_seed};
use idealkit_constructions::basic::{dirac_examples, erdos_ulam, hat, simple_density};
use idealkit_constructions::dl::{default_iota, interval_dl};
use idealkit_constructions::examples::{build_capped_example, build_nu_example, capped_rows};
use idealkit_constructions::family::{DisjointFamily, Flavor};
use idealkit_constructions::normalize::{
    blockize as blockize_expr, check_normalized, dstrong_refine, normalize_supports, pad_supports, Padding,
    ScheduleEntry,
};
use idealkit_core::dsl::{parse_expr, parse_rational, parse_set};
use idealkit_core::eval::{eval as eval_expr, norm_profile as profile};
use idealkit_core::expr::Expr;
use idealkit_core::json::{field, float, object, qvalue_to_json, rational_from_json, rational_to_json, set_to_json};
use idealkit_core::qvalue::{ratio, QValue, Rational};
use idealkit_core::sets::{NatSet, PointSet, Sort, Window};
use idealkit_pathology::{envelope, pathology_scan, Objective, SubsetTable};
use idealkit_witness::cert::family_from_json;
use idealkit_witness::{ksf_condition_check, ksf_enumerate, obstruction_check, sdl_check, CheckOutcome, FailureWitness};

use crate::error::CliError;
use crate::report::RunReport;
use crate::suites;
use crate::{BuildName, BuildParams, FlavorArg, Global, VariantArg};

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_expr(path: &Path) -> Result<Expr, CliError> {
    parse_expr(&read_text(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn window(g: &Global) -> Window {
    Window::new(g.window)
}

fn inputs(g: &Global, args: Value) -> Value {
    object([
        ("args", args),
        ("window", Value::from(g.window)),
        ("seed", Value::from(g.seed)),
        ("budget", Value::from(g.budget)),
        ("tolerance", float(g.tolerance)),
    ])
}

fn q(r: &Rational) -> QValue {
    QValue::Finite(r.clone())
}

/// A set argument in DSL form, checked against the expected sort and the window.
fn set_arg(text: &str, sort: Sort, w: &Window) -> Result<PointSet, CliError> {
    let set = parse_set(text)?;
    let set = if set.is_empty() { PointSet::empty(sort) } else { set };
    if set.sort() != sort {
        return Err(CliError::usage(format!("expected a set of sort {sort}, got {}", set.sort())));
    }
    w.check_set(&set)?;
    Ok(set)
}

fn flavor(f: FlavorArg) -> Flavor {
    match f {
        FlavorArg::Disj => Flavor::Disj,
        FlavorArg::Incr => Flavor::Incr,
        FlavorArg::Int => Flavor::Int,
    }
}

fn read_family(path: &Path, sort: Sort, f: FlavorArg) -> Result<DisjointFamily, CliError> {
    let fam = family_from_json(&read_json(path)?, sort, "$")?;
    Ok(DisjointFamily::new(fam.members().to_vec(), flavor(f))?)
}

fn family_json(f: &DisjointFamily) -> Value {
    Value::Array(f.members().iter().map(set_to_json).collect())
}

fn named(name: String, e: &Expr) -> Value {
    object([("name", Value::from(name)), ("dsl", Value::from(e.to_string()))])
}

pub fn eval(g: &Global, path: &Path, set: &str) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let w = window(g);
    let set = set_arg(set, expr.sort(), &w)?;
    let v = eval_expr(&expr, &set, &w)?;
    let mut r = RunReport::new(
        "eval",
        inputs(g, object([("expr", Value::from(expr.to_string())), ("set", set_to_json(&set))])),
    );
    r.line(v.to_string());
    r.artifact(object([
        ("kind", Value::from("eval")),
        ("value", qvalue_to_json(&v)),
        ("approx", float(v.to_f64())),
    ]));
    Ok(r)
}

pub fn norm_profile(g: &Global, path: &Path, set: &str, depth: Option<usize>) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let w = window(g);
    let set = set_arg(set, expr.sort(), &w)?;
    let depth = depth.unwrap_or(set.len());
    let p = profile(&expr, &set, depth, &w)?;
    let mut r = RunReport::new(
        "norm-profile",
        inputs(
            g,
            object([
                ("expr", Value::from(expr.to_string())),
                ("set", set_to_json(&set)),
                ("depth", Value::from(depth)),
            ]),
        ),
    );
    for (n, v) in p.values.iter().enumerate() {
        r.line(format!("{n}\t{v}"));
    }
    r.artifact(object([
        ("kind", Value::from("norm-profile")),
        ("values", Value::Array(p.values.iter().map(qvalue_to_json).collect())),
        ("tail", qvalue_to_json(p.tail())),
    ]));
    Ok(r)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn build(g: &Global, name: BuildName, p: &BuildParams) -> Result<RunReport, CliError> {
    let w = window(g);
    let label = clap::ValueEnum::to_possible_value(&name).expect("no skipped names").get_name().to_string();
    let mut args = vec![("name", Value::from(label.clone()))];
    let mut exprs: Vec<(String, Expr)> = Vec::new();
    let mut extra: Vec<(&'static str, Value)> = Vec::new();
    let mut lines = Vec::new();
    let length = p.length.unwrap_or(w.bound);
    match name {
        BuildName::NuExample => {
            args.extend([("kmax", Value::from(p.kmax)), ("mmax", Value::from(p.mmax))]);
            let ex = build_nu_example(p.kmax, p.mmax, &w)?;
            for (n, (mu, nu)) in ex.mus.iter().zip(&ex.nus).enumerate() {
                exprs.push((format!("mu_{n}"), mu.clone()));
                exprs.push((format!("nu_{n}"), nu.clone()));
            }
            let blocks = (0..=p.kmax)
                .flat_map(|n| (0..=p.mmax).map(move |m| (n, m)))
                .map(|(n, m)| {
                    let (lo, hi) = ex.block(n, m);
                    Value::Array(vec![n.into(), m.into(), lo.into(), hi.into()])
                })
                .collect();
            extra.push(("blocks", Value::Array(blocks)));
        }
        BuildName::CappedExample => {
            args.push(("nmax", Value::from(p.nmax)));
            let rows = capped_rows(p.nmax, &w);
            exprs.push(("capped".into(), build_capped_example(&rows)?));
            extra.push(("rowSizes", Value::Array(rows.iter().map(|x| x.len().into()).collect())));
        }
        BuildName::IntervalDl => {
            args.push(("count", Value::from(p.count)));
            let iota = default_iota(p.count);
            let (_, e) = interval_dl(&iota)?;
            exprs.push(("interval_dl".into(), e));
            extra.push(("iota", Value::Array(iota.iter().map(|&x| x.into()).collect())));
        }
        BuildName::HatOf => {
            let path = p.phi.as_deref().ok_or_else(|| CliError::usage("hat-of needs --phi FILE"))?;
            let phi = read_expr(path)?;
            args.push(("phi", Value::from(phi.to_string())));
            exprs.push(("hat".into(), hat(phi)?));
        }
        BuildName::MzPartition => {
            args.push(("count", Value::from(p.count)));
            let part = mz_partition(p.count, &w)?;
            let blocks: Vec<Value> = (0..part.len())
                .map(|i| {
                    let (z, (lo, hi)) = (part.zs[i], part.columns[i]);
                    lines.push(format!("M_({},{})\trow {}\tcolumns [{lo}, {hi})\tsize {}", z.0, z.1, z.0, part.sizes[i]));
                    object([
                        ("z", Value::Array(vec![z.0.into(), z.1.into()])),
                        ("size", Value::from(part.sizes[i])),
                        ("columns", Value::Array(vec![lo.into(), hi.into()])),
                    ])
                })
                .collect();
            extra.push(("blocks", Value::Array(blocks)));
        }
        BuildName::AdFamily => {
            if p.seeds.is_empty() {
                return Err(CliError::usage("ad-family needs --seeds, e.g. --seeds 0,01,1"));
            }
            args.extend([
                ("seeds", Value::Array(p.seeds.iter().map(|s| Value::from(s.as_str())).collect())),
                ("depth", Value::from(p.depth)),
            ]);
            let seeds = p.seeds.iter().map(|s| parse_seed(s)).collect::<Result<Vec<_>, _>>()?;
            let fam = ad_family(&seeds, p.depth)?;
            for (s, set) in p.seeds.iter().zip(&fam.sets) {
                lines.push(format!("{s}\t{}", idealkit_core::dsl::set_to_string(&PointSet::Nat(set.clone()))));
            }
            extra.push((
                "sets",
                Value::Array(fam.sets.iter().map(|s| set_to_json(&PointSet::Nat(s.clone()))).collect()),
            ));
        }
        BuildName::DiracFin | BuildName::DiracFinplus => {
            let (all, even) = dirac_examples(&w);
            if name == BuildName::DiracFin {
                exprs.push(("dirac_fin".into(), all));
            } else {
                exprs.push(("dirac_finplus".into(), even));
            }
        }
        BuildName::ErdosUlam => {
            args.push(("length", Value::from(length)));
            let f = (0..length).map(|i| ratio(1, i as i64 + 1)).collect();
            exprs.push(("erdos_ulam".into(), erdos_ulam(f)?));
        }
        BuildName::SimpleDensity => {
            args.push(("length", Value::from(length)));
            let g = (1..=length).map(|n| Rational::from_integer(isqrt(n).into())).collect();
            exprs.push(("simple_density".into(), simple_density(g)?));
        }
    }
    let mut r = RunReport::new("build", inputs(g, object(args)));
    for (n, e) in &exprs {
        r.line(format!("{n} = {e}"));
    }
    for l in lines {
        r.line(l);
    }
    let mut artifact = vec![
        ("kind", Value::from("build")),
        ("name", Value::from(label)),
        ("exprs", Value::Array(exprs.iter().map(|(n, e)| named(n.clone(), e)).collect())),
    ];
    artifact.extend(extra);
    r.artifact(object(artifact));
    Ok(r)
}

pub fn check_obstruction(
    g: &Global,
    path: &Path,
    family: &Path,
    epsilon: &Rational,
    delta: &Rational,
    t: usize,
) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let fam = read_family(family, expr.sort(), FlavorArg::Disj)?;
    for m in fam.members() {
        window(g).check_set(m)?;
    }
    let mut r = RunReport::new(
        "check-obstruction",
        inputs(
            g,
            object([
                ("expr", Value::from(expr.to_string())),
                ("family", family_json(&fam)),
                ("epsilon", rational_to_json(epsilon)),
                ("delta", rational_to_json(delta)),
                ("t", Value::from(t)),
            ]),
        ),
    );
    match obstruction_check(&expr, &fam, &q(epsilon), &q(delta), t)? {
        CheckOutcome::Certificate(c) => {
            r.line(format!(
                "obstruction: {} members below {delta}, every {t}-subfamily unions to at least {}",
                fam.len(),
                c.min_union_value
            ));
            r.artifact(c.to_json());
            r.fail_if(true);
        }
        CheckOutcome::Failure(w) => {
            let detail = match &w {
                FailureWitness::LargeMember { index, value } => {
                    r.line(format!("no obstruction: member {index} has value {value}, not below {delta}"));
                    object([
                        ("reason", Value::from("large-member")),
                        ("index", Value::from(*index)),
                        ("value", qvalue_to_json(value)),
                    ])
                }
                FailureWitness::SmallUnion { indices, value } => {
                    r.line(format!("no obstruction: members {indices:?} union to {value} < {epsilon}"));
                    object([
                        ("reason", Value::from("small-union")),
                        ("indices", Value::from(indices.clone())),
                        ("value", qvalue_to_json(value)),
                    ])
                }
            };
            r.artifact(object([("kind", Value::from("no-obstruction")), ("witness", detail)]));
        }
    }
    Ok(r)
}

pub fn search_obstruction(
    g: &Global,
    path: &Path,
    epsilon: &Rational,
    delta: &Rational,
    m: usize,
    t: usize,
) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let mut r = RunReport::new(
        "search-obstruction",
        inputs(
            g,
            object([
                ("expr", Value::from(expr.to_string())),
                ("epsilon", rational_to_json(epsilon)),
                ("delta", rational_to_json(delta)),
                ("m", Value::from(m)),
                ("t", Value::from(t)),
            ]),
        ),
    );
    let found =
        idealkit_witness::search_obstruction(&expr, &window(g), &q(epsilon), &q(delta), m, t, g.budget as u64)?;
    match found {
        Some(c) => {
            r.line(format!("obstruction found: {m} members, every {t}-union at least {}", c.min_union_value));
            r.artifact(c.to_json());
            r.fail_if(true);
        }
        None => {
            r.line(format!("no obstruction among {} candidate families", g.budget));
            r.artifact(object([("kind", Value::from("no-obstruction")), ("searched", Value::from(g.budget))]));
        }
    }
    Ok(r)
}

pub fn check_sdl(
    g: &Global,
    path: &Path,
    family: &Path,
    c: &Rational,
    epsilon: &Rational,
    f: FlavorArg,
) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let fam = read_family(family, expr.sort(), f)?;
    let want = g.budget.min(fam.len());
    let out = sdl_check(&expr, &q(c), &q(epsilon), &fam, want)?;
    let mut r = RunReport::new(
        "check-sdl",
        inputs(
            g,
            object([
                ("expr", Value::from(expr.to_string())),
                ("family", family_json(&fam)),
                ("c", rational_to_json(c)),
                ("epsilon", rational_to_json(epsilon)),
            ]),
        ),
    );
    if out.passed {
        r.line(format!("selected {} members, union value {}", out.selected.len(), out.union_value));
    } else {
        r.line(format!(
            "only {} of {want} members could be selected below {epsilon}: {:?}",
            out.selected.len(),
            out.selected
        ));
    }
    r.fail_if(!out.passed);
    r.artifact(object([
        ("kind", Value::from("sdl")),
        ("passed", Value::Bool(out.passed)),
        ("wanted", Value::from(want)),
        ("selected", Value::from(out.selected.clone())),
        ("unionValue", qvalue_to_json(&out.union_value)),
    ]));
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
pub fn check_ksf(
    g: &Global,
    path: &Path,
    family: &Path,
    cuts: &[u64],
    epsilon: &Rational,
    maxlen: usize,
    variant: VariantArg,
    f: FlavorArg,
) -> Result<RunReport, CliError> {
    let expr = read_expr(path)?;
    let fam = read_family(family, expr.sort(), f)?;
    let count = ksf_enumerate(cuts, &fam, maxlen)?.len();
    if count > g.budget {
        return Err(CliError::resource(format!("{count} selections exceed the budget of {}", g.budget)));
    }
    let variant = match variant {
        VariantArg::Full => idealkit_witness::Variant::Full,
        VariantArg::Even => idealkit_witness::Variant::Even,
    };
    let violations = ksf_condition_check(&expr, cuts, &fam, &q(epsilon), maxlen, variant)?;
    let mut r = RunReport::new(
        "check-ksf",
        inputs(
            g,
            object([
                ("expr", Value::from(expr.to_string())),
                ("family", family_json(&fam)),
                ("cuts", Value::from(cuts.to_vec())),
                ("epsilon", rational_to_json(epsilon)),
                ("maxlen", Value::from(maxlen)),
                ("variant", Value::from(format!("{variant:?}").to_lowercase())),
            ]),
        ),
    );
    r.line(format!("{count} selections up to length {maxlen}, {} reach {epsilon}", violations.len()));
    for v in violations.iter().take(20) {
        r.line(format!("  {:?}\t{}", v.selection, v.value));
    }
    r.fail_if(!violations.is_empty());
    r.artifact(object([
        ("kind", Value::from("ksf")),
        ("selections", Value::from(count)),
        (
            "violations",
            Value::Array(
                violations
                    .iter()
                    .map(|v| object([("selection", Value::from(v.selection.clone())), ("value", qvalue_to_json(&v.value))]))
                    .collect(),
            ),
        ),
    ]));
    Ok(r)
}

fn rational_field(v: &Value, key: &str, path: &str) -> Result<Rational, CliError> {
    let x = field(v, key, path)?;
    let p = format!("{path}.{key}");
    match x {
        Value::String(s) => parse_rational(s).ok_or_else(|| CliError::usage(format!("{p}: not a rational"))),
        Value::Number(n) if n.is_u64() => Ok(Rational::from_integer(n.as_u64().unwrap().into())),
        _ => Ok(rational_from_json(x, &p)?),
    }
}

pub fn refine_dstrong(g: &Global, phi_path: &Path, schedule: &Path) -> Result<RunReport, CliError> {
    let phi = read_expr(phi_path)?;
    let raw = read_json(schedule)?;
    let entries = raw.as_array().ok_or_else(|| CliError::usage("schedule: expected a JSON list"))?;
    let schedule = entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let path = format!("$[{k}]");
            let cuts = field(e, "cuts", &path)?
                .as_array()
                .and_then(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<u64>>>())
                .ok_or_else(|| CliError::usage(format!("{path}.cuts: expected a list of naturals")))?;
            Ok(ScheduleEntry {
                epsilon: rational_field(e, "epsilon", &path)?,
                delta: rational_field(e, "delta", &path)?,
                cuts,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let refined = dstrong_refine(&phi, &schedule, &window(g))?;
    let sched_json = schedule
        .iter()
        .map(|e| {
            object([
                ("epsilon", rational_to_json(&e.epsilon)),
                ("delta", rational_to_json(&e.delta)),
                ("cuts", Value::from(e.cuts.clone())),
            ])
        })
        .collect();
    let mut r = RunReport::new(
        "refine-dstrong",
        inputs(g, object([("phi", Value::from(phi.to_string())), ("schedule", Value::Array(sched_json))])),
    );
    r.line(format!("cuts = {:?}", refined.cuts));
    r.line(format!("psi = {}", refined.psi));
    r.line(format!("nu = {}", refined.nu));
    r.artifact(object([
        ("kind", Value::from("dstrong")),
        ("cuts", Value::from(refined.cuts.clone())),
        ("psi", Value::from(refined.psi.to_string())),
        ("nu", Value::from(refined.nu.to_string())),
    ]));
    Ok(r)
}

pub fn blockize(g: &Global, path: &Path, cuts: &[u64]) -> Result<RunReport, CliError> {
    let nu = read_expr(path)?;
    let mus = blockize_expr(&nu, cuts)?;
    let mut r = RunReport::new(
        "blockize",
        inputs(g, object([("nu", Value::from(nu.to_string())), ("cuts", Value::from(cuts.to_vec()))])),
    );
    for (n, m) in mus.iter().enumerate() {
        r.line(format!("mu_{n} = {m}"));
    }
    r.artifact(object([
        ("kind", Value::from("blockize")),
        (
            "exprs",
            Value::Array(mus.iter().enumerate().map(|(n, m)| named(format!("mu_{n}"), m)).collect()),
        ),
    ]));
    Ok(r)
}

pub fn normalize(g: &Global, paths: &[std::path::PathBuf], pad: Option<u64>) -> Result<RunReport, CliError> {
    let w = window(g);
    let mut mus = paths.iter().map(|p| read_expr(p)).collect::<Result<Vec<_>, _>>()?;
    let mut r = RunReport::new(
        "normalize-supports",
        inputs(
            g,
            object([
                ("mus", Value::Array(mus.iter().map(|m| Value::from(m.to_string())).collect())),
                ("pad", pad.map_or(Value::Null, Value::from)),
            ]),
        ),
    );
    if let Some(target) = pad {
        mus = pad_supports(&mus, target, Padding::FiniteComplement, &w)?;
    }
    let out = normalize_supports(&mus, &w)?;
    let top = out.supports.iter().filter_map(NatSet::max).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let samples: Vec<NatSet> = (0..8)
        .map(|_| {
            let p: f64 = rng.gen_range(0.05..0.6);
            (0..=top).filter(|_| rng.gen_bool(p)).collect()
        })
        .collect();
    let checked = check_normalized(&mus, &out, &samples);
    for (n, (v, nu)) in out.intervals.members().iter().zip(&out.nus).enumerate() {
        let v = v.as_nat().expect("intervals live on ω");
        r.line(format!("V_{n} = [{}, {}]\tnu_{n} = {nu}", v.min().unwrap(), v.max().unwrap()));
    }
    r.line(format!("j = {:?}", out.j));
    match &checked {
        Ok(()) => r.line("postconditions hold on 8 sampled sets"),
        Err(e) => r.line(format!("postcondition failed: {e}")),
    }
    r.fail_if(checked.is_err());
    r.artifact(object([
        ("kind", Value::from("normalize-supports")),
        ("intervals", family_json(&out.intervals)),
        ("j", Value::from(out.j.clone())),
        (
            "nus",
            Value::Array(out.nus.iter().enumerate().map(|(n, e)| named(format!("nu_{n}"), e)).collect()),
        ),
        ("checked", Value::Bool(checked.is_ok())),
    ]));
    Ok(r)
}

pub fn pathology(
    g: &Global,
    expr: Option<&Path>,
    table: Option<&Path>,
    support: Option<&str>,
    target: Option<&str>,
    samples: usize,
) -> Result<RunReport, CliError> {
    let w = window(g);
    let (objective, default_support): (Objective, Option<PointSet>) = match (expr, table) {
        (_, Some(t)) => {
            let table = SubsetTable::from_json(&read_json(t)?)?;
            let ground = table.ground();
            (table.into(), Some(ground))
        }
        (Some(e), None) => (read_expr(e)?.into(), None),
        (None, None) => return Err(CliError::usage("pathology needs an expression file or --table")),
    };
    let sort = objective.sort();
    let support = match (support, default_support) {
        (Some(s), _) => set_arg(s, sort, &w)?,
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::usage("pathology needs --support for an expression")),
    };
    let target = target.map(|t| set_arg(t, sort, &w)).transpose()?;
    let mut args = vec![("objective", objective.to_json()), ("support", set_to_json(&support))];
    match &target {
        Some(t) => args.push(("target", set_to_json(t))),
        None => args.push(("samples", Value::from(samples))),
    }
    let mut r = RunReport::new("pathology", inputs(g, object(args)));
    let gap_f64 = |x: &Rational| x.to_f64().unwrap_or(f64::INFINITY);
    match target {
        Some(t) => {
            let rep = envelope(objective, &t, &support, g.tolerance)?;
            r.line(format!("value {}\tenvelope {} (lp {})\tgap {}", rep.value, rep.certified, rep.lp, rep.gap));
            r.fail_if(gap_f64(&rep.gap) > g.tolerance);
            r.artifact(rep.to_json());
        }
        None => {
            let count = samples.min(g.budget);
            let scan = pathology_scan(objective, &support, count, g.tolerance, g.seed)?;
            let worst = scan.worst.as_ref();
            match worst {
                Some(rep) => r.line(format!(
                    "{} targets, largest gap {} at {}",
                    scan.targets,
                    rep.gap,
                    idealkit_core::dsl::set_to_string(&rep.target)
                )),
                None => r.line("no targets"),
            }
            r.fail_if(scan.max_gap().is_some_and(|x| gap_f64(x) > g.tolerance));
            r.artifact(object([
                ("kind", Value::from("pathology-scan")),
                ("targets", Value::from(scan.targets)),
                ("worst", worst.map_or(Value::Null, |rep| rep.to_json())),
            ]));
        }
    }
    Ok(r)
}

pub fn verify_paper(g: &Global) -> Result<RunReport, CliError> {
    let checks = suites::verify_all(g.seed, g.tolerance);
    let mut r = RunReport::new("verify-paper", inputs(g, object([])));
    for c in &checks {
        r.line(format!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.name, c.summary));
        r.artifact(c.to_json());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    r.line(format!("{} checks, {failed} failed", checks.len()));
    r.fail_if(failed > 0);
    Ok(r)
}
