//! Immutable submeasure expressions.
//!
//! Every constructor validates its node, so a value of type [`Expr`] always
//! satisfies the structural invariants: sorts agree through the tree,
//! `TopKSum` children have disjoint supports, `QMix` weights sum to one and
//! so on. Children are shared through `Arc`, which makes cloning cheap and
//! lets evaluators run on several threads.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::ExprError;
use crate::qvalue::Rational;
use crate::sets::{Point, Region, Sort, Window};
use crate::support::Support;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    /// Finitely supported measure; weights sorted by canonical point order.
    Measure { sort: Sort, weights: Vec<(Point, Rational)> },
    /// `a · min(cap, |A ∩ block|)`.
    CappedCount { a: Rational, cap: u64, block: Region },
    Scale { c: Rational, child: Expr },
    Sum(Vec<Expr>),
    Sup(Vec<Expr>),
    /// Sum of the `k` largest child values.
    TopKSum { k: usize, children: Vec<Expr> },
    /// `(Σ a_i φ_i^q)^(1/q)`.
    QMix { q: Rational, terms: Vec<(Rational, Expr)> },
    Restrict { child: Expr, mask: Region },
    /// Reads row `row` of a grid set and evaluates `child` on that section.
    RowLift { child: Expr, row: u64 },
    /// Evaluates `child` on the set of rows met by `h⁻¹[A]`.
    Hat(Expr),
    /// `δ_k` for the least `k` whose closed interval `[lo_k, hi_k]` meets `A`.
    StepInterval { steps: Vec<(Rational, u64, u64)> },
    /// Weighted prefix-ratio submeasure; `prefix[n] = Σ_{i≤n} f(i)`.
    ErdosUlam { f: Vec<Rational>, prefix: Vec<Rational> },
    /// `max_{1≤n≤|g|} |A ∩ n| / g(n)`, with `g[j]` holding `g(j+1)`.
    SimpleDensity { g: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    node: Arc<Node>,
    sort: Sort,
}

fn err(path: &str, msg: impl Into<String>) -> ExprError {
    ExprError::new(path, msg)
}

fn positive(path: &str, what: &str, r: &Rational) -> Result<(), ExprError> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(err(path, format!("{what} must be positive, got {r}")))
    }
}

fn common_sort(path: &str, children: &[&Expr]) -> Result<Sort, ExprError> {
    let first = children
        .first()
        .ok_or_else(|| err(path, "empty child list"))?
        .sort;
    for (i, c) in children.iter().enumerate() {
        if c.sort != first {
            return Err(err(&format!("{path}[{i}]"), format!("sort {} differs from {}", c.sort, first)));
        }
    }
    Ok(first)
}

impl Expr {
    fn make(node: Node, sort: Sort) -> Expr {
        Expr {
            node: Arc::new(node),
            sort,
        }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    /// DSL keyword of the root node, used in error paths.
    pub fn keyword(&self) -> &'static str {
        match &*self.node {
            Node::Measure { .. } => "measure",
            Node::CappedCount { .. } => "capped",
            Node::Scale { .. } => "scale",
            Node::Sum(_) => "sum",
            Node::Sup(_) => "sup",
            Node::TopKSum { .. } => "topk",
            Node::QMix { .. } => "qmix",
            Node::Restrict { .. } => "restrict",
            Node::RowLift { .. } => "rowlift",
            Node::Hat(_) => "hat",
            Node::StepInterval { .. } => "step",
            Node::ErdosUlam { .. } => "erdos-ulam",
            Node::SimpleDensity { .. } => "simple-density",
        }
    }

    pub fn measure(sort: Sort, weights: impl IntoIterator<Item = (Point, Rational)>) -> Result<Expr, ExprError> {
        let path = "measure";
        let mut w: Vec<(Point, Rational)> = weights.into_iter().collect();
        for (p, r) in &w {
            if p.sort() != sort {
                return Err(err(path, format!("point {p} is not of sort {sort}")));
            }
            positive(path, "weight", r)?;
        }
        w.sort_by_key(|a| a.0);
        if w.windows(2).any(|x| x[0].0 == x[1].0) {
            return Err(err(path, "repeated point"));
        }
        Ok(Expr::make(Node::Measure { sort, weights: w }, sort))
    }

    /// Empty measure, the zero submeasure of the given sort.
    pub fn zero(sort: Sort) -> Expr {
        Expr::make(
            Node::Measure {
                sort,
                weights: Vec::new(),
            },
            sort,
        )
    }

    /// Point mass of weight one.
    pub fn dirac(p: Point) -> Expr {
        Expr::make(
            Node::Measure {
                sort: p.sort(),
                weights: vec![(p, Rational::one())],
            },
            p.sort(),
        )
    }

    pub fn capped(a: Rational, cap: u64, block: Region) -> Result<Expr, ExprError> {
        let path = "capped";
        positive(path, "coefficient", &a)?;
        if cap == 0 {
            return Err(err(path, "cap must be positive"));
        }
        if block.is_empty() {
            return Err(err(path, "empty block"));
        }
        let sort = block.sort();
        Ok(Expr::make(Node::CappedCount { a, cap, block }, sort))
    }

    pub fn scale(c: Rational, child: Expr) -> Result<Expr, ExprError> {
        positive("scale", "factor", &c)?;
        let sort = child.sort;
        Ok(Expr::make(Node::Scale { c, child }, sort))
    }

    pub fn sum(children: Vec<Expr>) -> Result<Expr, ExprError> {
        let sort = common_sort("sum", &children.iter().collect::<Vec<_>>())?;
        Ok(Expr::make(Node::Sum(children), sort))
    }

    pub fn sup(children: Vec<Expr>) -> Result<Expr, ExprError> {
        let sort = common_sort("sup", &children.iter().collect::<Vec<_>>())?;
        Ok(Expr::make(Node::Sup(children), sort))
    }

    pub fn topk(k: usize, children: Vec<Expr>) -> Result<Expr, ExprError> {
        let path = "topk";
        if k == 0 {
            return Err(err(path, "k must be positive"));
        }
        let sort = common_sort(path, &children.iter().collect::<Vec<_>>())?;
        let supports: Vec<Support> = children.iter().map(Expr::support).collect();
        for i in 0..supports.len() {
            for j in i + 1..supports.len() {
                if supports[i].overlaps(&supports[j]) {
                    return Err(err(path, format!("supports of children {i} and {j} intersect")));
                }
            }
        }
        Ok(Expr::make(Node::TopKSum { k, children }, sort))
    }

    pub fn qmix(q: Rational, terms: Vec<(Rational, Expr)>) -> Result<Expr, ExprError> {
        let path = "qmix";
        if q < Rational::one() {
            return Err(err(path, format!("exponent {q} is below 1")));
        }
        if terms.is_empty() {
            return Err(err(path, "empty term list"));
        }
        let mut total = Rational::zero();
        for (i, (a, _)) in terms.iter().enumerate() {
            if a.is_negative() || *a > Rational::one() {
                return Err(err(&format!("{path}[{i}]"), format!("weight {a} outside [0, 1]")));
            }
            total += a;
        }
        if !total.is_one() {
            return Err(err(path, format!("weights sum to {total}, not 1")));
        }
        let sort = common_sort(path, &terms.iter().map(|(_, e)| e).collect::<Vec<_>>())?;
        Ok(Expr::make(Node::QMix { q, terms }, sort))
    }

    pub fn restrict(child: Expr, mask: Region) -> Result<Expr, ExprError> {
        if mask.sort() != child.sort {
            return Err(err(
                "restrict",
                format!("mask of sort {} on an expression of sort {}", mask.sort(), child.sort),
            ));
        }
        let sort = child.sort;
        Ok(Expr::make(Node::Restrict { child, mask }, sort))
    }

    pub fn rowlift(child: Expr, row: u64) -> Result<Expr, ExprError> {
        if child.sort != Sort::Nat {
            return Err(err("rowlift", "child must be over ω"));
        }
        Ok(Expr::make(Node::RowLift { child, row }, Sort::Grid))
    }

    pub fn hat(child: Expr) -> Result<Expr, ExprError> {
        if child.sort != Sort::Nat {
            return Err(err("hat", "child must be over ω"));
        }
        Ok(Expr::make(Node::Hat(child), Sort::Nat))
    }

    /// Steps `(δ_k, lo_k, hi_k)` over closed intervals; they must tile an
    /// initial segment in order and `δ` must strictly decrease.
    pub fn step(steps: Vec<(Rational, u64, u64)>) -> Result<Expr, ExprError> {
        let path = "step";
        if steps.is_empty() {
            return Err(err(path, "empty step list"));
        }
        let mut expected_lo = 0u64;
        for (i, (d, lo, hi)) in steps.iter().enumerate() {
            let here = format!("{path}[{i}]");
            positive(&here, "step value", d)?;
            if *lo != expected_lo || hi < lo {
                return Err(err(&here, format!("interval [{lo}, {hi}] does not start at {expected_lo}")));
            }
            if i > 0 && *d >= steps[i - 1].0 {
                return Err(err(&here, "step values must strictly decrease"));
            }
            expected_lo = hi
                .checked_add(1)
                .ok_or_else(|| err(&here, "interval end overflows"))?;
        }
        Ok(Expr::make(Node::StepInterval { steps }, Sort::Nat))
    }

    pub fn erdos_ulam(f: Vec<Rational>) -> Result<Expr, ExprError> {
        let path = "erdos-ulam";
        if f.is_empty() {
            return Err(err(path, "empty weight list"));
        }
        let mut prefix = Vec::with_capacity(f.len());
        let mut acc = Rational::zero();
        for (i, x) in f.iter().enumerate() {
            positive(&format!("{path}[{i}]"), "weight", x)?;
            acc += x;
            prefix.push(acc.clone());
        }
        Ok(Expr::make(Node::ErdosUlam { f, prefix }, Sort::Nat))
    }

    pub fn simple_density(g: Vec<Rational>) -> Result<Expr, ExprError> {
        let path = "simple-density";
        if g.is_empty() {
            return Err(err(path, "empty list"));
        }
        for (i, x) in g.iter().enumerate() {
            positive(&format!("{path}[{i}]"), "entry", x)?;
            if i > 0 && *x < g[i - 1] {
                return Err(err(&format!("{path}[{i}]"), "entries must be nondecreasing"));
            }
        }
        Ok(Expr::make(Node::SimpleDensity { g }, Sort::Nat))
    }

    /// Direct children, in order.
    pub fn children(&self) -> Vec<&Expr> {
        match &*self.node {
            Node::Scale { child, .. }
            | Node::Restrict { child, .. }
            | Node::RowLift { child, .. }
            | Node::Hat(child) => vec![child],
            Node::Sum(cs) | Node::Sup(cs) | Node::TopKSum { children: cs, .. } => cs.iter().collect(),
            Node::QMix { terms, .. } => terms.iter().map(|(_, e)| e).collect(),
            _ => Vec::new(),
        }
    }

    /// Structural support: every point any child can see.
    pub fn support(&self) -> Support {
        match &*self.node {
            Node::Measure { sort, weights } => {
                let points: Vec<Point> = weights.iter().map(|(p, _)| *p).collect();
                Support::from(crate::sets::PointSet::from_points(*sort, &points).expect("sorted points"))
            }
            Node::CappedCount { block, .. } => Support::from(block.clone()),
            Node::Scale { child, .. } => child.support(),
            Node::Sum(cs) | Node::Sup(cs) | Node::TopKSum { children: cs, .. } => {
                Support::union(cs.iter().map(Expr::support))
            }
            Node::QMix { terms, .. } => Support::union(
                terms
                    .iter()
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(_, e)| e.support()),
            ),
            Node::Restrict { child, mask } => child.support().restrict(mask),
            Node::RowLift { child, row } => child.support().lift(*row),
            Node::Hat(child) => child.support().hat(),
            Node::StepInterval { steps } => Support::new(
                steps
                    .iter()
                    .map(|(_, lo, hi)| crate::support::Piece::Region(Region::Block { lo: *lo, hi: hi + 1 }))
                    .collect(),
            ),
            Node::ErdosUlam { f, .. } => Support::from(Region::Block {
                lo: 0,
                hi: f.len() as u64,
            }),
            Node::SimpleDensity { g } => Support::from(Region::Block {
                lo: 0,
                hi: g.len() as u64,
            }),
        }
    }

    /// Checks that every set argument in the tree lies inside the window.
    /// `Hat` nodes read codes of arbitrary size and are not bounded by this.
    pub fn check_window(&self, window: &Window) -> Result<(), ExprError> {
        self.check_window_at(window, self.keyword())
    }

    fn check_window_at(&self, window: &Window, path: &str) -> Result<(), ExprError> {
        let bound = window.bound;
        let outside = |m: Option<u64>| m.is_some_and(|m| m >= bound);
        let own = match &*self.node {
            Node::Measure { weights, .. } => weights.iter().any(|(p, _)| window.check_point(*p).is_err()),
            Node::CappedCount { block, .. } => outside(block.max_coordinate()),
            Node::Restrict { mask, .. } => outside(mask.max_coordinate()),
            Node::RowLift { row, .. } => *row >= bound,
            Node::StepInterval { steps } => outside(steps.last().map(|s| s.2)),
            Node::ErdosUlam { f, .. } => f.len() as u64 > bound,
            Node::SimpleDensity { g } => g.len() as u64 > bound,
            _ => false,
        };
        if own {
            return Err(err(path, format!("set argument leaves the window bound {bound}")));
        }
        for (i, c) in self.children().into_iter().enumerate() {
            c.check_window_at(window, &format!("{path}[{i}]/{}", c.keyword()))?;
        }
        Ok(())
    }

    /// Children of a top-level `Sup`, flattening nested `Sup`s; any other
    /// expression is its own single component.
    pub fn sup_components(&self) -> Vec<Expr> {
        match &*self.node {
            Node::Sup(cs) => cs.iter().flat_map(Expr::sup_components).collect(),
            _ => vec![self.clone()],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qvalue::{int, ratio};
    use crate::sets::{GridSet, NatSet};

    #[test]
    fn measure_validation() {
        assert!(Expr::measure(Sort::Nat, [(Point::Nat(0), ratio(1, 2))]).is_ok());
        assert!(Expr::measure(Sort::Nat, [(Point::Nat(0), int(0))]).is_err());
        assert!(Expr::measure(Sort::Nat, [(Point::Grid(0, 0), int(1))]).is_err());
        assert!(Expr::measure(Sort::Nat, [(Point::Nat(1), int(1)), (Point::Nat(1), int(2))]).is_err());
    }

    #[test]
    fn qmix_weights_must_sum_to_one() {
        let d0 = Expr::dirac(Point::Nat(0));
        let d1 = Expr::dirac(Point::Nat(1));
        let e = Expr::qmix(int(1), vec![(ratio(1, 2), d0.clone()), (ratio(1, 3), d1.clone())]).unwrap_err();
        assert!(e.message.contains("5/6"));
        assert!(Expr::qmix(ratio(1, 2), vec![(int(1), d0.clone())]).is_err());
        assert!(Expr::qmix(int(2), vec![(ratio(1, 2), d0), (ratio(1, 2), d1)]).is_ok());
    }

    #[test]
    fn topk_requires_disjoint_supports() {
        let a = Expr::capped(int(1), 1, Region::block(0, 4).unwrap()).unwrap();
        let b = Expr::capped(int(1), 1, Region::block(3, 6).unwrap()).unwrap();
        let c = Expr::capped(int(1), 1, Region::block(4, 6).unwrap()).unwrap();
        assert!(Expr::topk(1, vec![a.clone(), b]).is_err());
        assert!(Expr::topk(1, vec![a, c]).is_ok());
    }

    #[test]
    fn sorts_propagate() {
        let d = Expr::dirac(Point::Nat(3));
        let g = Expr::rowlift(d.clone(), 2).unwrap();
        assert_eq!(g.sort(), Sort::Grid);
        assert!(Expr::sup(vec![d.clone(), g.clone()]).is_err());
        assert!(Expr::hat(g.clone()).is_err());
        assert!(Expr::restrict(d, Region::Grid(GridSet::new())).is_err());
        let s = g.support();
        assert!(s.contains(Point::Grid(2, 3)));
        assert!(!s.contains(Point::Grid(3, 3)));
    }

    #[test]
    fn step_validation() {
        assert!(Expr::step(vec![(ratio(1, 2), 0, 2), (ratio(1, 4), 3, 3)]).is_ok());
        assert!(Expr::step(vec![(ratio(1, 2), 0, 2), (ratio(1, 4), 4, 5)]).is_err());
        assert!(Expr::step(vec![(ratio(1, 4), 0, 2), (ratio(1, 2), 3, 5)]).is_err());
        assert!(Expr::step(vec![]).is_err());
    }

    #[test]
    fn window_check_reports_path() {
        let inner = Expr::capped(int(1), 1, Region::Nat(NatSet::from_iter([3, 50]))).unwrap();
        let e = Expr::sup(vec![Expr::dirac(Point::Nat(0)), inner]).unwrap();
        let err = e.check_window(&Window::new(20)).unwrap_err();
        assert_eq!(err.path, "sup[1]/capped");
        assert!(e.check_window(&Window::new(51)).is_ok());
    }

    #[test]
    fn empty_lists_are_errors() {
        assert!(Expr::sum(vec![]).is_err());
        assert!(Expr::sup(vec![]).is_err());
        assert!(Expr::erdos_ulam(vec![]).is_err());
        assert!(Expr::simple_density(vec![int(2), int(1)]).is_err());
    }
}
