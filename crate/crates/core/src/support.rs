//! Structural supports of expressions, kept as unions of cheap pieces so that
//! very large interval blocks never have to be enumerated.

use crate::pairing::{pair_encode, row_of};
use crate::sets::{NatSet, Point, PointSet, Region, Sort};

/// Codes `h(r, c)` only fit in 64 bits for rows below this.
const MAX_ROW: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Region(Region),
    /// `{row} × inner` for a piece over ω.
    Lifted { row: u64, inner: Box<Piece> },
    /// `h[rows × ω]`.
    HatRows(NatSet),
}

impl Piece {
    pub fn sort(&self) -> Sort {
        match self {
            Piece::Region(r) => r.sort(),
            Piece::Lifted { .. } => Sort::Grid,
            Piece::HatRows(_) => Sort::Nat,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match (self, p) {
            (Piece::Region(r), p) => r.contains(p),
            (Piece::Lifted { row, inner }, Point::Grid(r, c)) => r == *row && inner.contains(Point::Nat(c)),
            (Piece::HatRows(rows), Point::Nat(n)) => n != u64::MAX && rows.contains(row_of(n)),
            _ => false,
        }
    }

    pub fn meets(&self, set: &PointSet) -> bool {
        match (self, set) {
            (Piece::Region(r), s) => r.count_in(s) > 0,
            (Piece::Lifted { row, inner }, PointSet::Grid(g)) => inner.meets(&PointSet::Nat(g.row(*row))),
            (Piece::HatRows(_), PointSet::Nat(s)) => s.iter().any(|n| self.contains(Point::Nat(n))),
            _ => false,
        }
    }

    /// The first `limit` points of the piece below `bound` in canonical order.
    pub fn points(&self, bound: u64, limit: usize) -> Vec<Point> {
        match self {
            Piece::Region(Region::Block { lo, hi }) => {
                (*lo..(*hi).min(bound)).take(limit).map(Point::Nat).collect()
            }
            Piece::Region(Region::Nat(s)) => s.iter().filter(|&n| n < bound).take(limit).map(Point::Nat).collect(),
            Piece::Region(Region::Grid(g)) => g
                .h_sorted()
                .into_iter()
                .filter(|&(r, c)| r < bound && c < bound)
                .take(limit)
                .map(|(r, c)| Point::Grid(r, c))
                .collect(),
            Piece::Lifted { row, inner } => {
                if *row >= bound {
                    return Vec::new();
                }
                inner
                    .points(bound, limit)
                    .into_iter()
                    .filter_map(|p| match p {
                        Point::Nat(c) => Some(Point::Grid(*row, c)),
                        Point::Grid(..) => None,
                    })
                    .collect()
            }
            Piece::HatRows(rows) => (0..bound)
                .filter(|&n| rows.contains(row_of(n)))
                .take(limit)
                .map(Point::Nat)
                .collect(),
        }
    }

    /// Number of points below `bound`.
    fn bounded_len(&self, bound: u64) -> u64 {
        match self {
            Piece::Region(Region::Block { lo, hi }) => (*hi).min(bound).saturating_sub(*lo),
            Piece::Lifted { row, inner } if *row < bound => inner.bounded_len(bound),
            Piece::Lifted { .. } => 0,
            _ => self.points(bound, usize::MAX).len() as u64,
        }
    }

    /// Largest point coordinate, when the piece is finite.
    pub fn max_coordinate(&self) -> Option<u64> {
        match self {
            Piece::Region(r) => r.max_coordinate(),
            Piece::Lifted { row, inner } => inner.max_coordinate().map(|c| c.max(*row)),
            Piece::HatRows(rows) if rows.is_empty() => None,
            Piece::HatRows(_) => Some(u64::MAX),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Piece::Region(r) => r.is_empty(),
            Piece::Lifted { inner, .. } => inner.is_empty(),
            Piece::HatRows(rows) => rows.is_empty(),
        }
    }

    fn nat_rows(&self) -> NatSet {
        // rows that a nat piece occupies once read as row indices of `h`
        match self {
            Piece::Region(Region::Block { lo, hi }) => NatSet::interval(*lo, (*hi).min(MAX_ROW)),
            Piece::Region(Region::Nat(s)) => s.filter_range(0, MAX_ROW),
            Piece::HatRows(_) => NatSet::interval(0, MAX_ROW)
                .iter()
                .filter(|&n| self.contains(Point::Nat(n)))
                .collect(),
            _ => NatSet::new(),
        }
    }

    /// `self ∩ mask`.
    pub fn intersect(&self, mask: &Region) -> Piece {
        match (self, mask) {
            (Piece::Region(Region::Block { lo, hi }), Region::Block { lo: l2, hi: h2 }) => {
                let lo = (*lo).max(*l2);
                let hi = (*hi).min(*h2).max(lo);
                Piece::Region(Region::Block { lo, hi })
            }
            (Piece::Region(Region::Block { lo, hi }), Region::Nat(s)) => {
                Piece::Region(Region::Nat(s.filter_range(*lo, *hi)))
            }
            (Piece::Region(r), m) => Piece::Region(r.restrict(&m.to_point_set()).into()),
            (Piece::Lifted { row, inner }, Region::Grid(g)) => {
                Piece::Lifted {
                    row: *row,
                    inner: Box::new(inner.intersect(&Region::Nat(g.row(*row)))),
                }
            }
            (Piece::HatRows(_), Region::Block { lo, hi }) => Piece::Region(Region::Nat(
                (*lo..*hi).filter(|&n| self.contains(Point::Nat(n))).collect(),
            )),
            (Piece::HatRows(_), Region::Nat(s)) => {
                Piece::Region(Region::Nat(s.iter().filter(|&n| self.contains(Point::Nat(n))).collect()))
            }
            (p, _) => Piece::Region(Region::from(PointSet::empty(p.sort()))),
        }
    }

    pub fn overlaps(&self, other: &Piece) -> bool {
        if self.sort() != other.sort() || self.is_empty() || other.is_empty() {
            return false;
        }
        match (self, other) {
            (Piece::Region(Region::Block { lo, hi }), Piece::Region(Region::Block { lo: l2, hi: h2 })) => {
                lo.max(l2) < hi.min(h2)
            }
            (Piece::Region(a), Piece::Region(b)) => a.count_in(&b.to_point_set()) > 0,
            (Piece::Lifted { row, inner }, Piece::Lifted { row: r2, inner: i2 }) => row == r2 && inner.overlaps(i2),
            (Piece::Lifted { row, inner }, Piece::Region(Region::Grid(g)))
            | (Piece::Region(Region::Grid(g)), Piece::Lifted { row, inner }) => {
                inner.meets(&PointSet::Nat(g.row(*row)))
            }
            (Piece::HatRows(a), Piece::HatRows(b)) => !a.is_disjoint(b),
            (Piece::HatRows(rows), Piece::Region(Region::Block { lo, hi }))
            | (Piece::Region(Region::Block { lo, hi }), Piece::HatRows(rows)) => {
                rows.iter().any(|r| first_code_at_least(r, *lo).is_some_and(|n| n < *hi))
            }
            (Piece::HatRows(_), Piece::Region(Region::Nat(s))) | (Piece::Region(Region::Nat(s)), Piece::HatRows(_)) => {
                let hat = if let Piece::HatRows(_) = self { self } else { other };
                hat.meets(&PointSet::Nat(s.clone()))
            }
            _ => false,
        }
    }
}

/// Smallest `n >= lo` with `row_of(n) = row`.
fn first_code_at_least(row: u64, lo: u64) -> Option<u64> {
    if row >= MAX_ROW {
        return None;
    }
    let step = 1u128 << row;
    let target = lo as u128 + 1;
    let mut odd = target.div_ceil(step);
    if odd.is_multiple_of(2) {
        odd += 1;
    }
    let n = step * odd - 1;
    u64::try_from(n).ok()
}

/// A finite union of pieces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Support {
    pub pieces: Vec<Piece>,
}

impl Support {
    pub fn new(pieces: Vec<Piece>) -> Self {
        Support {
            pieces: pieces.into_iter().filter(|p| !p.is_empty()).collect(),
        }
    }

    pub fn union(supports: impl IntoIterator<Item = Support>) -> Support {
        Support::new(supports.into_iter().flat_map(|s| s.pieces).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces.iter().any(|x| x.contains(p))
    }

    pub fn meets(&self, set: &PointSet) -> bool {
        self.pieces.iter().any(|x| x.meets(set))
    }

    pub fn overlaps(&self, other: &Support) -> bool {
        self.pieces.iter().any(|a| other.pieces.iter().any(|b| a.overlaps(b)))
    }

    pub fn restrict(&self, mask: &Region) -> Support {
        Support::new(self.pieces.iter().map(|p| p.intersect(mask)).collect())
    }

    pub fn lift(&self, row: u64) -> Support {
        Support::new(
            self.pieces
                .iter()
                .filter(|p| p.sort() == Sort::Nat)
                .map(|p| Piece::Lifted {
                    row,
                    inner: Box::new(p.clone()),
                })
                .collect(),
        )
    }

    pub fn hat(&self) -> Support {
        let rows = self
            .pieces
            .iter()
            .fold(NatSet::new(), |acc, p| acc.union(&p.nat_rows()));
        Support::new(vec![Piece::HatRows(rows)])
    }

    pub fn max_coordinate(&self) -> Option<u64> {
        self.pieces.iter().filter_map(Piece::max_coordinate).max()
    }

    /// All points below `bound`, as a set of the given sort.
    pub fn to_point_set(&self, sort: Sort, bound: u64) -> PointSet {
        let points: Vec<Point> = self
            .pieces
            .iter()
            .flat_map(|p| p.points(bound, usize::MAX))
            .collect();
        PointSet::from_points(sort, &points).expect("pieces share the sort")
    }

    pub fn len_below(&self, bound: u64) -> u64 {
        self.pieces.iter().map(|p| p.bounded_len(bound)).sum()
    }
}

impl From<Region> for Support {
    fn from(r: Region) -> Self {
        Support::new(vec![Piece::Region(r)])
    }
}

impl From<PointSet> for Support {
    fn from(s: PointSet) -> Self {
        Support::from(Region::from(s))
    }
}

/// `h`-codes of `rows × [0, cols)` that fit below `bound`.
pub fn hat_codes(rows: &NatSet, bound: u64) -> NatSet {
    rows.iter()
        .flat_map(|r| (0..).map_while(move |c| pair_encode(r, c).ok().filter(|&n| n < bound)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GridSet;

    #[test]
    fn hat_block_overlap() {
        let hat = Piece::HatRows(NatSet::from_iter([2]));
        // row 2 codes: 3, 11, 19, ...
        assert!(!hat.overlaps(&Piece::Region(Region::Block { lo: 4, hi: 11 })));
        assert!(hat.overlaps(&Piece::Region(Region::Block { lo: 4, hi: 12 })));
        assert_eq!(first_code_at_least(0, 5), Some(6));
        assert_eq!(first_code_at_least(2, 0), Some(3));
    }

    #[test]
    fn lifted_pieces() {
        let a = Piece::Lifted {
            row: 1,
            inner: Box::new(Piece::Region(Region::Block { lo: 0, hi: 5 })),
        };
        let g = Piece::Region(Region::Grid(GridSet::from_iter([(1, 7), (0, 2)])));
        assert!(!a.overlaps(&g));
        let g2 = Piece::Region(Region::Grid(GridSet::from_iter([(1, 4)])));
        assert!(a.overlaps(&g2));
        assert_eq!(a.points(100, 2), vec![Point::Grid(1, 0), Point::Grid(1, 1)]);
    }

    #[test]
    fn hat_code_listing() {
        let codes = hat_codes(&NatSet::from_iter([1]), 12);
        assert_eq!(codes.as_slice(), &[1, 5, 9]);
    }
}
