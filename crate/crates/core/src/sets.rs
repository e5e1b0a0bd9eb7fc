//! Finite subsets of ω and ω×ω, set arguments of expression nodes, and the
//! evaluation window.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SetError;
use crate::pairing::{h_cmp, pair_decode, pair_encode};

/// Which ground set an expression or a set lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Nat,
    Grid,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Nat => "nat",
            Sort::Grid => "grid",
        })
    }
}

/// A point of ω or of ω×ω. Ordered canonically: naturals numerically, grid
/// points by their `h`-code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Nat(u64),
    Grid(u64, u64),
}

impl Point {
    pub fn sort(&self) -> Sort {
        match self {
            Point::Nat(_) => Sort::Nat,
            Point::Grid(..) => Sort::Grid,
        }
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Nat(a), Point::Nat(b)) => a.cmp(b),
            (Point::Grid(r1, c1), Point::Grid(r2, c2)) => h_cmp((*r1, *c1), (*r2, *c2)),
            (Point::Nat(_), Point::Grid(..)) => Ordering::Less,
            (Point::Grid(..), Point::Nat(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "{n}"),
            Point::Grid(r, c) => write!(f, "({r} {c})"),
        }
    }
}

/// Finite subset of ω, kept sorted and duplicate free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NatSet(Vec<u64>);

impl NatSet {
    pub fn new() -> Self {
        NatSet(Vec::new())
    }

    /// Half-open interval `[lo, hi)`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        NatSet((lo..hi.max(lo)).collect())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// True when the set is a nonempty run of consecutive naturals.
    pub fn is_interval(&self) -> bool {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => hi - lo + 1 == self.len() as u64,
            _ => false,
        }
    }

    /// `|self ∩ [lo, hi)|`.
    pub fn count_in_range(&self, lo: u64, hi: u64) -> usize {
        if hi <= lo {
            return 0;
        }
        let a = self.0.partition_point(|&x| x < lo);
        let b = self.0.partition_point(|&x| x < hi);
        b - a
    }

    pub fn count_common(&self, other: &NatSet) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().filter(|&x| large.contains(x)).count()
    }

    pub fn union(&self, other: &NatSet) -> NatSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    v.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    v.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    v.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        NatSet(v)
    }

    pub fn intersection(&self, other: &NatSet) -> NatSet {
        NatSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &NatSet) -> NatSet {
        NatSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_disjoint(&self, other: &NatSet) -> bool {
        self.count_common(other) == 0
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn filter_range(&self, lo: u64, hi: u64) -> NatSet {
        NatSet(self.iter().filter(|&x| x >= lo && x < hi).collect())
    }
}

impl FromIterator<u64> for NatSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut v: Vec<u64> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NatSet(v)
    }
}

/// Finite subset of ω×ω, sorted lexicographically by `(row, col)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GridSet(Vec<(u64, u64)>);

impl GridSet {
    pub fn new() -> Self {
        GridSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[(u64, u64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, p: (u64, u64)) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// The section `{c : (row, c) ∈ self}`.
    pub fn row(&self, row: u64) -> NatSet {
        let a = self.0.partition_point(|&(r, _)| r < row);
        let b = self.0.partition_point(|&(r, _)| r <= row);
        NatSet(self.0[a..b].iter().map(|&(_, c)| c).collect())
    }

    /// Rows with a nonempty section.
    pub fn rows(&self) -> NatSet {
        let mut v: Vec<u64> = self.0.iter().map(|&(r, _)| r).collect();
        v.dedup();
        NatSet(v)
    }

    /// Points in `h`-code order.
    pub fn h_sorted(&self) -> Vec<(u64, u64)> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| h_cmp(*a, *b));
        v
    }

    /// `{row} × cols`.
    pub fn row_lift(cols: &NatSet, row: u64) -> GridSet {
        GridSet(cols.iter().map(|c| (row, c)).collect())
    }

    pub fn union(&self, other: &GridSet) -> GridSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &GridSet) -> GridSet {
        GridSet(self.iter().filter(|&p| other.contains(p)).collect())
    }

    pub fn difference(&self, other: &GridSet) -> GridSet {
        GridSet(self.iter().filter(|&p| !other.contains(p)).collect())
    }

    pub fn count_common(&self, other: &GridSet) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().filter(|&p| large.contains(p)).count()
    }

    /// Image under `h`; fails when a code overflows 64 bits.
    pub fn encode(&self) -> Result<NatSet, crate::pairing::PairingError> {
        self.iter()
            .map(|(r, c)| pair_encode(r, c))
            .collect::<Result<NatSet, _>>()
    }

    /// Preimage `h⁻¹[set]`.
    pub fn decode(set: &NatSet) -> GridSet {
        set.iter()
            .map(|n| pair_decode(n).expect("window points decode"))
            .collect()
    }
}

impl FromIterator<(u64, u64)> for GridSet {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        let mut v: Vec<(u64, u64)> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        GridSet(v)
    }
}

/// A finite set of either sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointSet {
    Nat(NatSet),
    Grid(GridSet),
}

impl PointSet {
    pub fn empty(sort: Sort) -> Self {
        match sort {
            Sort::Nat => PointSet::Nat(NatSet::new()),
            Sort::Grid => PointSet::Grid(GridSet::new()),
        }
    }

    /// Builds a set from points that must all share `sort`.
    pub fn from_points(sort: Sort, points: &[Point]) -> Result<Self, SetError> {
        match sort {
            Sort::Nat => points
                .iter()
                .map(|p| match p {
                    Point::Nat(n) => Ok(*n),
                    Point::Grid(..) => Err(SetError::SortMismatch {
                        expected: Sort::Nat,
                        found: Sort::Grid,
                    }),
                })
                .collect::<Result<NatSet, _>>()
                .map(PointSet::Nat),
            Sort::Grid => points
                .iter()
                .map(|p| match p {
                    Point::Grid(r, c) => Ok((*r, *c)),
                    Point::Nat(_) => Err(SetError::SortMismatch {
                        expected: Sort::Grid,
                        found: Sort::Nat,
                    }),
                })
                .collect::<Result<GridSet, _>>()
                .map(PointSet::Grid),
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            PointSet::Nat(_) => Sort::Nat,
            PointSet::Grid(_) => Sort::Grid,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Nat(s) => s.len(),
            PointSet::Grid(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in canonical (`h`-code) order.
    pub fn canonical_points(&self) -> Vec<Point> {
        match self {
            PointSet::Nat(s) => s.iter().map(Point::Nat).collect(),
            PointSet::Grid(s) => s.h_sorted().into_iter().map(|(r, c)| Point::Grid(r, c)).collect(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match (self, p) {
            (PointSet::Nat(s), Point::Nat(n)) => s.contains(n),
            (PointSet::Grid(s), Point::Grid(r, c)) => s.contains((r, c)),
            _ => false,
        }
    }

    pub fn min_point(&self) -> Option<Point> {
        self.canonical_points().into_iter().next()
    }

    pub fn max_point(&self) -> Option<Point> {
        match self {
            PointSet::Nat(s) => s.max().map(Point::Nat),
            PointSet::Grid(s) => s.iter().max_by(|a, b| h_cmp(*a, *b)).map(|(r, c)| Point::Grid(r, c)),
        }
    }

    fn same_sort(&self, other: &PointSet) -> Result<(), SetError> {
        if self.sort() == other.sort() {
            Ok(())
        } else {
            Err(SetError::SortMismatch {
                expected: self.sort(),
                found: other.sort(),
            })
        }
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet, SetError> {
        self.same_sort(other)?;
        Ok(match (self, other) {
            (PointSet::Nat(a), PointSet::Nat(b)) => PointSet::Nat(a.union(b)),
            (PointSet::Grid(a), PointSet::Grid(b)) => PointSet::Grid(a.union(b)),
            _ => unreachable!(),
        })
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet, SetError> {
        self.same_sort(other)?;
        Ok(match (self, other) {
            (PointSet::Nat(a), PointSet::Nat(b)) => PointSet::Nat(a.intersection(b)),
            (PointSet::Grid(a), PointSet::Grid(b)) => PointSet::Grid(a.intersection(b)),
            _ => unreachable!(),
        })
    }

    pub fn difference(&self, other: &PointSet) -> Result<PointSet, SetError> {
        self.same_sort(other)?;
        Ok(match (self, other) {
            (PointSet::Nat(a), PointSet::Nat(b)) => PointSet::Nat(a.difference(b)),
            (PointSet::Grid(a), PointSet::Grid(b)) => PointSet::Grid(a.difference(b)),
            _ => unreachable!(),
        })
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        match (self, other) {
            (PointSet::Nat(a), PointSet::Nat(b)) => a.is_disjoint(b),
            (PointSet::Grid(a), PointSet::Grid(b)) => a.count_common(b) == 0,
            _ => true,
        }
    }

    /// Removes the `n` canonically smallest points.
    pub fn without_first(&self, n: usize) -> PointSet {
        match self {
            PointSet::Nat(s) => PointSet::Nat(NatSet(s.as_slice().iter().skip(n).copied().collect())),
            PointSet::Grid(s) => PointSet::Grid(s.h_sorted().into_iter().skip(n).collect()),
        }
    }

    /// The subset indexed by positions in canonical order.
    pub fn subset_by_mask(points: &[Point], mask: u64, sort: Sort) -> PointSet {
        let chosen: Vec<Point> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        PointSet::from_points(sort, &chosen).expect("points share the sort")
    }

    pub fn as_nat(&self) -> Option<&NatSet> {
        match self {
            PointSet::Nat(s) => Some(s),
            PointSet::Grid(_) => None,
        }
    }

    pub fn as_grid(&self) -> Option<&GridSet> {
        match self {
            PointSet::Grid(s) => Some(s),
            PointSet::Nat(_) => None,
        }
    }
}

impl From<NatSet> for PointSet {
    fn from(s: NatSet) -> Self {
        PointSet::Nat(s)
    }
}

impl From<GridSet> for PointSet {
    fn from(s: GridSet) -> Self {
        PointSet::Grid(s)
    }
}

/// Set argument of an expression node (`CappedCount` block, `Restrict` mask).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// Half-open interval `[lo, hi)` of naturals.
    Block { lo: u64, hi: u64 },
    Nat(NatSet),
    Grid(GridSet),
}

impl Region {
    pub fn block(lo: u64, hi: u64) -> Result<Region, SetError> {
        if hi <= lo {
            return Err(SetError::EmptyBlock { lo, hi });
        }
        Ok(Region::Block { lo, hi })
    }

    pub fn sort(&self) -> Sort {
        match self {
            Region::Block { .. } | Region::Nat(_) => Sort::Nat,
            Region::Grid(_) => Sort::Grid,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Region::Block { lo, hi } => hi - lo,
            Region::Nat(s) => s.len() as u64,
            Region::Grid(s) => s.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|set ∩ self|`; zero for a set of the other sort.
    pub fn count_in(&self, set: &PointSet) -> u64 {
        match (self, set) {
            (Region::Block { lo, hi }, PointSet::Nat(s)) => s.count_in_range(*lo, *hi) as u64,
            (Region::Nat(r), PointSet::Nat(s)) => r.count_common(s) as u64,
            (Region::Grid(r), PointSet::Grid(s)) => r.count_common(s) as u64,
            _ => 0,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match (self, p) {
            (Region::Block { lo, hi }, Point::Nat(n)) => n >= *lo && n < *hi,
            (Region::Nat(r), Point::Nat(n)) => r.contains(n),
            (Region::Grid(r), Point::Grid(a, b)) => r.contains((a, b)),
            _ => false,
        }
    }

    /// `set ∩ self`.
    pub fn restrict(&self, set: &PointSet) -> PointSet {
        match (self, set) {
            (Region::Block { lo, hi }, PointSet::Nat(s)) => PointSet::Nat(s.filter_range(*lo, *hi)),
            (Region::Nat(r), PointSet::Nat(s)) => PointSet::Nat(s.intersection(r)),
            (Region::Grid(r), PointSet::Grid(s)) => PointSet::Grid(s.intersection(r)),
            (_, other) => PointSet::empty(other.sort()),
        }
    }

    pub fn to_point_set(&self) -> PointSet {
        match self {
            Region::Block { lo, hi } => PointSet::Nat(NatSet::interval(*lo, *hi)),
            Region::Nat(s) => PointSet::Nat(s.clone()),
            Region::Grid(s) => PointSet::Grid(s.clone()),
        }
    }

    /// Largest natural / largest grid coordinate, for window checks.
    pub fn max_coordinate(&self) -> Option<u64> {
        match self {
            Region::Block { hi, .. } => Some(hi - 1),
            Region::Nat(s) => s.max(),
            Region::Grid(s) => s.iter().map(|(r, c)| r.max(c)).max(),
        }
    }
}

impl From<PointSet> for Region {
    fn from(s: PointSet) -> Self {
        match s {
            PointSet::Nat(n) => Region::Nat(n),
            PointSet::Grid(g) => Region::Grid(g),
        }
    }
}

/// Bound `W` on every natural and every grid coordinate handled by an
/// evaluation. Lower semicontinuity holds by construction on such a window
/// and is not checked at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub bound: u64,
}

impl Window {
    pub const DEFAULT_BOUND: u64 = 4096;

    pub fn new(bound: u64) -> Self {
        Window { bound }
    }

    pub fn check_point(&self, p: Point) -> Result<(), SetError> {
        let inside = match p {
            Point::Nat(n) => n < self.bound,
            Point::Grid(r, c) => r < self.bound && c < self.bound,
        };
        if inside {
            Ok(())
        } else {
            Err(SetError::OutsideWindow {
                point: p.to_string(),
                bound: self.bound,
            })
        }
    }

    pub fn check_set(&self, set: &PointSet) -> Result<(), SetError> {
        match set {
            PointSet::Nat(s) => match s.max() {
                Some(m) => self.check_point(Point::Nat(m)),
                None => Ok(()),
            },
            PointSet::Grid(s) => s.iter().try_for_each(|(r, c)| self.check_point(Point::Grid(r, c))),
        }
    }

    /// All naturals of the window.
    pub fn naturals(&self) -> NatSet {
        NatSet::interval(0, self.bound)
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::new(Self::DEFAULT_BOUND)
    }
}
