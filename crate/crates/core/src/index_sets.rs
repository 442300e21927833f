//! The index-set family `D(K)`, derived compositions `K_I` and the regions
//! `B_I` / sharp regions `B^I` of admissible configurations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    is_admissible, partial_sums_within, satisfies_difference, Configuration, LevelComposition,
};
use crate::error::{Error, Result};

/// Sorted, duplicate-free subset of `{0, ..., rank - 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet {
    elements: Vec<usize>,
}

impl IndexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts the input; rejects duplicates.
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.elements.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.elements.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut elements: Vec<usize> = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        elements.sort_unstable();
        elements.dedup();
        Self { elements }
    }

    pub fn with(&self, i: usize) -> Result<Self> {
        if self.contains(i) {
            return Err(Error::DuplicateIndex(i));
        }
        let mut elements = self.elements.clone();
        let at = elements.partition_point(|&e| e < i);
        elements.insert(at, i);
        Ok(Self { elements })
    }

    pub fn without(&self, i: usize) -> Self {
        Self {
            elements: self.elements.iter().copied().filter(|&e| e != i).collect(),
        }
    }

    /// Every element indexes a nonzero leading part of `k`.
    pub fn check_valid(&self, k: &LevelComposition) -> Result<()> {
        match self
            .elements
            .iter()
            .find(|&&i| i >= k.rank() || k.part(i) == 0)
        {
            Some(&index) => Err(Error::InvalidIndex {
                index,
                composition: k.parts().to_vec(),
            }),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.elements
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.elements.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// `D(K)` organised by set size. Serialises as `{"0": [[]], "1": [[0], ...], ...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexFamily {
    by_size: BTreeMap<usize, Vec<IndexSet>>,
}

impl IndexFamily {
    /// Sets of size `t`; empty for `t > m`.
    pub fn of_size(&self, t: usize) -> &[IndexSet] {
        self.by_size.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The number `m` of nonzero parts among `k_0, ..., k_{rank-1}`.
    pub fn m(&self) -> usize {
        self.by_size.len() - 1
    }

    /// The unique largest set `I_m`.
    pub fn top(&self) -> &IndexSet {
        &self.of_size(self.m())[0]
    }

    /// All members ordered by size, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &IndexSet> {
        self.by_size.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_size.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Number of nonzero parts among `k_0, ..., k_{rank-1}`.
pub fn m_of(k: &LevelComposition) -> usize {
    k.leading_parts().iter().filter(|&&p| p != 0).count()
}

pub fn d_family(k: &LevelComposition) -> IndexFamily {
    let support: Vec<usize> = (0..k.rank()).filter(|&i| k.part(i) != 0).collect();
    let mut by_size: BTreeMap<usize, Vec<IndexSet>> = BTreeMap::new();
    for mask in 0u64..(1 << support.len()) {
        let elements: Vec<usize> = support
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        by_size
            .entry(elements.len())
            .or_default()
            .push(IndexSet { elements });
    }
    for sets in by_size.values_mut() {
        sets.sort();
    }
    IndexFamily { by_size }
}

/// `k'_i = k_i - [i in I] + [i - 1 in I]`.
pub fn apply_index_set(k: &LevelComposition, set: &IndexSet) -> Result<LevelComposition> {
    set.check_valid(k)?;
    let mut parts = k.parts().to_vec();
    for &i in set.elements() {
        parts[i] -= 1;
        parts[i + 1] += 1;
    }
    LevelComposition::new(parts)
}

/// `(k_rank, k_0, ..., k_{rank-1})`.
pub fn cyclic_shift(k: &LevelComposition) -> LevelComposition {
    let mut parts = k.parts().to_vec();
    parts.rotate_right(1);
    LevelComposition::new(parts).expect("rotation keeps the part count")
}

/// Bounds `k_0 + ... + k_j - [j in A]` of the region `B_A`.
fn region_bounds(k: &LevelComposition, set: &IndexSet) -> Vec<u32> {
    let mut bounds = k.initial_bounds();
    for &j in set.elements() {
        bounds[j] -= 1;
    }
    bounds
}

/// Membership in `B_A` through the strengthened partial-sum system.
pub fn in_region(cfg: &Configuration, k: &LevelComposition, set: &IndexSet) -> Result<bool> {
    set.check_valid(k)?;
    Ok(satisfies_difference(cfg, k.rank(), k.level())
        && partial_sums_within(cfg, &region_bounds(k, set)))
}

/// Membership in `B_A` as admissibility for the derived composition `K_A`.
pub fn in_region_via_composition(
    cfg: &Configuration,
    k: &LevelComposition,
    set: &IndexSet,
) -> Result<bool> {
    Ok(is_admissible(cfg, &apply_index_set(k, set)?))
}

/// Membership in `B^B`: in `B_B` with partial-sum equality at every `j in I_m \ B`.
pub fn in_sharp_region(cfg: &Configuration, k: &LevelComposition, set: &IndexSet) -> Result<bool> {
    if !in_region(cfg, k, set)? {
        return Ok(false);
    }
    let mut acc = 0u32;
    for (j, bound) in k.initial_bounds().into_iter().enumerate() {
        acc += cfg.get(j);
        if k.part(j) != 0 && !set.contains(j) && acc != bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B^B = B_B \ union of B_C over C strictly containing B`, by brute force over `D(K)`.
pub fn in_sharp_region_by_definition(
    cfg: &Configuration,
    k: &LevelComposition,
    set: &IndexSet,
) -> Result<bool> {
    if !in_region(cfg, k, set)? {
        return Ok(false);
    }
    for c in d_family(k).iter() {
        if c.len() > set.len() && set.is_subset(c) && in_region(cfg, k, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(-1)^p` where `p` is the position of `i` in the sorted union `I ∪ {i}`.
pub fn position_sign(set: &IndexSet, i: usize) -> Result<i64> {
    if set.contains(i) {
        return Err(Error::DuplicateIndex(i));
    }
    let p = set.elements().iter().filter(|&&e| e < i).count();
    Ok(if p % 2 == 0 { 1 } else { -1 })
}
