//! Reader and printer for the s-expression language of submeasure
//! expressions.
//!
//! ```text
//! (sup (capped 1/2 1 (block 0 4))   ; comment
//!      (qmix 2 ((1/2 (measure ((0 1)))) (1/2 (measure ((1 1)))))))
//! ```
//!
//! Printing is canonical, and `parse_expr(&e.to_string())` rebuilds `e`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{ExprError, ParseError};
use crate::expr::{Expr, Node};
use crate::qvalue::Rational;
use crate::sets::{GridSet, NatSet, Point, PointSet, Region, Sort};

#[derive(Clone, Debug)]
enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }
}

fn syntax(at: (usize, usize), message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: at.0,
        column: at.1,
        message: message.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_blank();
        let at = (self.line, self.col);
        match self.chars.peek() {
            None => Err(syntax(at, "unexpected end of input")),
            Some(')') => Err(syntax(at, "unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(syntax(at, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List {
                                items,
                                line: at.0,
                                col: at.1,
                            });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom {
                    text,
                    line: at.0,
                    col: at.1,
                })
            }
        }
    }

    fn read_all_one(mut self) -> Result<Sexp, ParseError> {
        let s = self.read()?;
        self.skip_blank();
        if self.chars.peek().is_some() {
            return Err(syntax((self.line, self.col), "trailing input after the expression"));
        }
        Ok(s)
    }
}

fn atom<'s>(s: &'s Sexp, what: &str) -> Result<&'s str, ParseError> {
    match s {
        Sexp::Atom { text, .. } => Ok(text),
        Sexp::List { .. } => Err(syntax(s.pos(), format!("expected {what}, found a list"))),
    }
}

fn list<'s>(s: &'s Sexp, what: &str) -> Result<&'s [Sexp], ParseError> {
    match s {
        Sexp::List { items, .. } => Ok(items),
        Sexp::Atom { text, .. } => Err(syntax(s.pos(), format!("expected {what}, found '{text}'"))),
    }
}

fn natural(s: &Sexp) -> Result<u64, ParseError> {
    let t = atom(s, "a natural number")?;
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(s.pos(), format!("expected a natural number, found '{t}'")));
    }
    t.parse()
        .map_err(|_| syntax(s.pos(), format!("natural number '{t}' out of range")))
}

fn digits(t: &str) -> bool {
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `p` or `p/q` with `q > 0`.
pub fn parse_rational(t: &str) -> Option<Rational> {
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    if !digits(n) || !digits(d) {
        return None;
    }
    let n = BigInt::from_str(n).ok()?;
    let d = BigInt::from_str(d).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn rational(s: &Sexp) -> Result<Rational, ParseError> {
    let t = atom(s, "a rational")?;
    parse_rational(t).ok_or_else(|| syntax(s.pos(), format!("expected a nonnegative rational, found '{t}'")))
}

fn arity(items: &[Sexp], n: usize, head: &Sexp, kw: &str) -> Result<(), ParseError> {
    if items.len() != n + 1 {
        return Err(syntax(head.pos(), format!("'{kw}' takes {n} argument(s), got {}", items.len() - 1)));
    }
    Ok(())
}

fn grid_point(s: &Sexp) -> Result<(u64, u64), ParseError> {
    let items = list(s, "a grid point (r c)")?;
    if items.len() != 2 {
        return Err(syntax(s.pos(), "a grid point has two coordinates"));
    }
    Ok((natural(&items[0])?, natural(&items[1])?))
}

fn region(s: &Sexp) -> Result<Region, ParseError> {
    let items = list(s, "a set")?;
    let head = items.first().ok_or_else(|| syntax(s.pos(), "empty set form"))?;
    match atom(head, "a set keyword")? {
        "set" => Ok(Region::Nat(items[1..].iter().map(natural).collect::<Result<NatSet, _>>()?)),
        "block" => {
            arity(items, 2, s, "block")?;
            let (lo, hi) = (natural(&items[1])?, natural(&items[2])?);
            Region::block(lo, hi).map_err(|e| syntax(s.pos(), e.to_string()))
        }
        "grid" => Ok(Region::Grid(items[1..].iter().map(grid_point).collect::<Result<GridSet, _>>()?)),
        other => Err(syntax(head.pos(), format!("unknown set form '{other}'"))),
    }
}

fn nested(kw: &str, i: usize, child: ParseError) -> ParseError {
    match child {
        ParseError::Invalid(e) => ParseError::Invalid(ExprError::new(format!("{kw}[{i}]/{}", e.path), e.message)),
        other => other,
    }
}

fn expr(s: &Sexp) -> Result<Expr, ParseError> {
    let items = list(s, "an expression")?;
    let head = items.first().ok_or_else(|| syntax(s.pos(), "empty expression"))?;
    let kw = atom(head, "an expression keyword")?;
    let child = |i: usize, e: &Sexp| expr(e).map_err(|err| nested(kw, i, err));
    let children = |from: usize| -> Result<Vec<Expr>, ParseError> {
        items[from..].iter().enumerate().map(|(i, e)| child(i, e)).collect()
    };
    let built = match kw {
        "measure" => {
            arity(items, 1, s, kw)?;
            let pairs = list(&items[1], "a list of (point weight) pairs")?;
            let mut weights = Vec::with_capacity(pairs.len());
            let mut sort = None;
            for pair in pairs {
                let pw = list(pair, "a (point weight) pair")?;
                if pw.len() != 2 {
                    return Err(syntax(pair.pos(), "expected (point weight)"));
                }
                let p = match &pw[0] {
                    a @ Sexp::Atom { .. } => Point::Nat(natural(a)?),
                    l => {
                        let (r, c) = grid_point(l)?;
                        Point::Grid(r, c)
                    }
                };
                if *sort.get_or_insert(p.sort()) != p.sort() {
                    return Err(syntax(pw[0].pos(), "measure mixes natural and grid points"));
                }
                weights.push((p, rational(&pw[1])?));
            }
            Expr::measure(sort.unwrap_or(Sort::Nat), weights)
        }
        "capped" => {
            arity(items, 3, s, kw)?;
            Expr::capped(rational(&items[1])?, natural(&items[2])?, region(&items[3])?)
        }
        "scale" => {
            arity(items, 2, s, kw)?;
            Expr::scale(rational(&items[1])?, child(0, &items[2])?)
        }
        "sum" => Expr::sum(children(1)?),
        "sup" => Expr::sup(children(1)?),
        "topk" => {
            if items.len() < 2 {
                return Err(syntax(s.pos(), "'topk' needs k"));
            }
            let k = natural(&items[1])?;
            Expr::topk(k as usize, children(2)?)
        }
        "qmix" => {
            arity(items, 2, s, kw)?;
            let q = rational(&items[1])?;
            let mut terms = Vec::new();
            for (i, t) in list(&items[2], "a list of (weight expression) terms")?.iter().enumerate() {
                let ae = list(t, "a (weight expression) term")?;
                if ae.len() != 2 {
                    return Err(syntax(t.pos(), "expected (weight expression)"));
                }
                terms.push((rational(&ae[0])?, child(i, &ae[1])?));
            }
            Expr::qmix(q, terms)
        }
        "restrict" => {
            arity(items, 2, s, kw)?;
            Expr::restrict(child(0, &items[1])?, region(&items[2])?)
        }
        "rowlift" => {
            arity(items, 2, s, kw)?;
            Expr::rowlift(child(0, &items[1])?, natural(&items[2])?)
        }
        "hat" => {
            arity(items, 1, s, kw)?;
            Expr::hat(child(0, &items[1])?)
        }
        "step" => {
            arity(items, 1, s, kw)?;
            let mut steps = Vec::new();
            for st in list(&items[1], "a list of (d lo hi) steps")? {
                let dlh = list(st, "a (d lo hi) step")?;
                if dlh.len() != 3 {
                    return Err(syntax(st.pos(), "expected (d lo hi)"));
                }
                steps.push((rational(&dlh[0])?, natural(&dlh[1])?, natural(&dlh[2])?));
            }
            Expr::step(steps)
        }
        "erdos-ulam" => {
            arity(items, 1, s, kw)?;
            Expr::erdos_ulam(list(&items[1], "a weight list")?.iter().map(rational).collect::<Result<_, _>>()?)
        }
        "simple-density" => {
            arity(items, 1, s, kw)?;
            Expr::simple_density(list(&items[1], "a list of g values")?.iter().map(rational).collect::<Result<_, _>>()?)
        }
        other => return Err(syntax(head.pos(), format!("unknown expression form '{other}'"))),
    };
    built.map_err(ParseError::Invalid)
}

/// Parses and validates one expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    expr(&Reader::new(text).read_all_one()?)
}

/// Parses a set form: `(set ...)`, `(block lo hi)` or `(grid (r c) ...)`.
pub fn parse_region(text: &str) -> Result<Region, ParseError> {
    region(&Reader::new(text).read_all_one()?)
}

/// Parses a set form into an explicit point set.
pub fn parse_set(text: &str) -> Result<PointSet, ParseError> {
    Ok(parse_region(text)?.to_point_set())
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn region_to_string(r: &Region) -> String {
    let mut out = String::new();
    match r {
        Region::Block { lo, hi } => write!(out, "(block {lo} {hi})").unwrap(),
        Region::Nat(s) => {
            out.push_str("(set");
            for n in s.iter() {
                write!(out, " {n}").unwrap();
            }
            out.push(')');
        }
        Region::Grid(g) => {
            out.push_str("(grid");
            for (a, b) in g.iter() {
                write!(out, " ({a} {b})").unwrap();
            }
            out.push(')');
        }
    }
    out
}

pub fn set_to_string(s: &PointSet) -> String {
    region_to_string(&Region::from(s.clone()))
}

fn write_expr(e: &Expr, out: &mut String) {
    match e.node() {
        Node::Measure { sort, weights } => {
            if weights.is_empty() && *sort == Sort::Grid {
                // an empty grid measure has no point to carry its sort
                out.push_str("(rowlift (measure ()) 0)");
                return;
            }
            out.push_str("(measure (");
            for (i, (p, w)) in weights.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "({p} {})", fmt_rational(w)).unwrap();
            }
            out.push_str("))");
        }
        Node::CappedCount { a, cap, block } => {
            write!(out, "(capped {} {cap} {})", fmt_rational(a), region_to_string(block)).unwrap();
        }
        Node::Scale { c, child } => {
            write!(out, "(scale {} ", fmt_rational(c)).unwrap();
            write_expr(child, out);
            out.push(')');
        }
        Node::Sum(cs) | Node::Sup(cs) => {
            out.push('(');
            out.push_str(e.keyword());
            for c in cs {
                out.push(' ');
                write_expr(c, out);
            }
            out.push(')');
        }
        Node::TopKSum { k, children } => {
            write!(out, "(topk {k}").unwrap();
            for c in children {
                out.push(' ');
                write_expr(c, out);
            }
            out.push(')');
        }
        Node::QMix { q, terms } => {
            write!(out, "(qmix {} (", fmt_rational(q)).unwrap();
            for (i, (a, c)) in terms.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "({} ", fmt_rational(a)).unwrap();
                write_expr(c, out);
                out.push(')');
            }
            out.push_str("))");
        }
        Node::Restrict { child, mask } => {
            out.push_str("(restrict ");
            write_expr(child, out);
            write!(out, " {})", region_to_string(mask)).unwrap();
        }
        Node::RowLift { child, row } => {
            out.push_str("(rowlift ");
            write_expr(child, out);
            write!(out, " {row})").unwrap();
        }
        Node::Hat(child) => {
            out.push_str("(hat ");
            write_expr(child, out);
            out.push(')');
        }
        Node::StepInterval { steps } => {
            out.push_str("(step (");
            for (i, (d, lo, hi)) in steps.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "({} {lo} {hi})", fmt_rational(d)).unwrap();
            }
            out.push_str("))");
        }
        Node::ErdosUlam { f: xs, .. } | Node::SimpleDensity { g: xs } => {
            write!(out, "({} (", e.keyword()).unwrap();
            let parts: Vec<String> = xs.iter().map(fmt_rational).collect();
            out.push_str(&parts.join(" "));
            out.push_str("))");
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(self, &mut out);
        f.write_str(&out)
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::value;
    use crate::qvalue::{ratio, QValue};

    #[test]
    fn literal_measure() {
        let e = parse_expr("(measure ((0 1/2) (3 1/4)))").unwrap();
        let expected = Expr::measure(Sort::Nat, [(Point::Nat(0), ratio(1, 2)), (Point::Nat(3), ratio(1, 4))]).unwrap();
        assert_eq!(e, expected);
        assert_eq!(e.to_string(), "(measure ((0 1/2) (3 1/4)))");
    }

    #[test]
    fn qmix_weight_error() {
        let err = parse_expr("(qmix 1 ((1/2 (measure ((0 1)))) (1/3 (measure ((1 1))))))").unwrap_err();
        match err {
            ParseError::Invalid(e) => {
                assert_eq!(e.path, "qmix");
                assert!(e.message.contains("5/6"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nested_paths() {
        let err = parse_expr("(sup (measure ((0 1))) (qmix 1 ((1/2 (measure ((0 1)))))))").unwrap_err();
        match err {
            ParseError::Invalid(e) => assert_eq!(e.path, "sup[1]/qmix"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sup_of_capped() {
        let e = parse_expr("(sup (capped 1/2 1 (block 0 4)) (capped 1/6 2 (block 4 8)))").unwrap();
        assert_eq!(e.children().len(), 2);
        assert!(e.children().iter().all(|c| c.keyword() == "capped"));
        let v = value(&e, &parse_set("(set 4 5 6)").unwrap()).unwrap();
        assert_eq!(v, QValue::Finite(ratio(1, 3)));
    }

    #[test]
    fn syntax_positions() {
        match parse_expr("(sup\n  (measure ((0 x))))").unwrap_err() {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 16)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("(sup (measure ())"), Err(ParseError::Syntax { line: 1, column: 1, .. })));
        assert!(parse_expr("(frob)").is_err());
        assert!(parse_expr("(measure ()) (measure ())").is_err());
    }

    #[test]
    fn comments_and_grid_forms() {
        let text = "; lifted\n(rowlift (measure ((1 1))) 2) ; row two\n";
        let e = parse_expr(text).unwrap();
        assert_eq!(e.sort(), Sort::Grid);
        let g = parse_expr("(measure (((0 1) 1/2) ((2 0) 1)))").unwrap();
        assert_eq!(g.to_string(), "(measure (((0 1) 1/2) ((2 0) 1)))");
        assert_eq!(parse_expr(&g.to_string()).unwrap(), g);
        assert!(parse_expr("(measure ((0 1) ((1 1) 1)))").is_err());
    }

    #[test]
    fn set_forms() {
        assert_eq!(parse_set("(set 3 0)").unwrap(), PointSet::Nat(NatSet::from_iter([0, 3])));
        assert_eq!(parse_set("(block 2 5)").unwrap(), PointSet::Nat(NatSet::interval(2, 5)));
        assert_eq!(
            parse_set("(grid (1 2) (0 0))").unwrap(),
            PointSet::Grid(GridSet::from_iter([(0, 0), (1, 2)]))
        );
        assert!(parse_set("(block 3 3)").is_err());
    }

    #[test]
    fn printer_forms() {
        for text in [
            "(step ((1/2 0 3) (1/4 4 4)))",
            "(erdos-ulam (1 1/2 3))",
            "(simple-density (1 2 3))",
            "(topk 2 (capped 1 1 (block 0 2)) (capped 1/2 3 (set 5 7)))",
            "(restrict (hat (measure ((0 1)))) (block 0 9))",
            "(scale 3/2 (sum (measure ()) (measure ((4 2)))))",
            "(qmix 3/2 ((1 (capped 1 2 (grid (0 1) (1 1))))))",
        ] {
            assert_eq!(parse_expr(text).unwrap().to_string(), text);
        }
        assert_eq!(Expr::zero(Sort::Grid).to_string(), "(rowlift (measure ()) 0)");
    }
}
