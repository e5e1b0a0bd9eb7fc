use std::fmt;

use serde::{Deserialize, Serialize};

use idealkit_core::error::BuildError;
use idealkit_core::sets::{NatSet, Point, PointSet, Sort};

/// Which of the nested classes of disjoint sequences a family belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Pairwise disjoint.
    Disj,
    /// Disjoint and increasing: `max F_n < min F_{n+1}`.
    Incr,
    /// Increasing and every member an interval.
    Int,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Disj => "disj",
            Flavor::Incr => "incr",
            Flavor::Int => "int",
        })
    }
}

/// Ordered list of pairwise disjoint nonempty finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointFamily {
    members: Vec<PointSet>,
    flavor: Flavor,
}

impl DisjointFamily {
    pub fn new(members: Vec<PointSet>, flavor: Flavor) -> Result<Self, BuildError> {
        let first = members
            .first()
            .ok_or_else(|| BuildError::invalid("a family needs at least one member"))?;
        let sort = first.sort();
        for (i, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(BuildError::invalid(format!("member {i} is empty")));
            }
            if m.sort() != sort {
                return Err(BuildError::invalid(format!("member {i} has sort {}, expected {sort}", m.sort())));
            }
        }
        let mut owned: Vec<(Point, usize)> = members
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.canonical_points().into_iter().map(move |p| (p, i)))
            .collect();
        owned.sort();
        if let Some(w) = owned.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(BuildError::invalid(format!(
                "members {} and {} share the point {}",
                w[0].1, w[1].1, w[0].0
            )));
        }
        if flavor != Flavor::Disj {
            if sort != Sort::Nat {
                return Err(BuildError::invalid(format!("flavor {flavor} needs subsets of ω")));
            }
            for (i, w) in members.windows(2).enumerate() {
                let (a, b) = (w[0].as_nat().unwrap(), w[1].as_nat().unwrap());
                if a.max() >= b.min() {
                    return Err(BuildError::invalid(format!(
                        "members {i} and {} are not increasing",
                        i + 1
                    )));
                }
            }
        }
        if flavor == Flavor::Int {
            if let Some(i) = members.iter().position(|m| !m.as_nat().unwrap().is_interval()) {
                return Err(BuildError::invalid(format!("member {i} is not an interval")));
            }
        }
        Ok(DisjointFamily { members, flavor })
    }

    /// Family of subsets of ω with the given flavor.
    pub fn nat(members: Vec<NatSet>, flavor: Flavor) -> Result<Self, BuildError> {
        DisjointFamily::new(members.into_iter().map(PointSet::Nat).collect(), flavor)
    }

    pub fn members(&self) -> &[PointSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &PointSet {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn sort(&self) -> Sort {
        self.members[0].sort()
    }

    /// `⋃_{i ∈ indices} F_i`.
    pub fn union_of(&self, indices: &[usize]) -> PointSet {
        indices.iter().fold(PointSet::empty(self.sort()), |acc, &i| {
            acc.union(&self.members[i]).expect("members share the sort")
        })
    }

    /// Subfamily at the given indices, as a plain disjoint family.
    pub fn select(&self, indices: &[usize]) -> Result<DisjointFamily, BuildError> {
        DisjointFamily::new(indices.iter().map(|&i| self.members[i].clone()).collect(), Flavor::Disj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ns(xs: &[u64]) -> NatSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn flavors() {
        assert!(DisjointFamily::nat(vec![ns(&[0, 1]), ns(&[3, 4])], Flavor::Int).is_ok());
        assert!(DisjointFamily::nat(vec![ns(&[0, 2]), ns(&[3])], Flavor::Int).is_err());
        assert!(DisjointFamily::nat(vec![ns(&[0, 2]), ns(&[3])], Flavor::Incr).is_ok());
        assert!(DisjointFamily::nat(vec![ns(&[0, 4]), ns(&[3])], Flavor::Incr).is_err());
        assert!(DisjointFamily::nat(vec![ns(&[0, 4]), ns(&[3])], Flavor::Disj).is_ok());
        assert!(DisjointFamily::nat(vec![ns(&[0, 4]), ns(&[4])], Flavor::Disj).is_err());
        assert!(DisjointFamily::nat(vec![ns(&[0]), ns(&[])], Flavor::Disj).is_err());
        assert!(DisjointFamily::nat(vec![], Flavor::Disj).is_err());
    }

    #[test]
    fn unions() {
        let f = DisjointFamily::nat(vec![ns(&[0]), ns(&[5]), ns(&[2, 3])], Flavor::Disj).unwrap();
        assert_eq!(f.union_of(&[0, 2]), PointSet::Nat(ns(&[0, 2, 3])));
        assert_eq!(f.union_of(&[]), PointSet::Nat(NatSet::new()));
    }
}
