//! Compositions, configurations and the admissibility predicates.
//!
//! A configuration is the exponent sequence `(a_0, a_1, ...)` of a monomial in
//! the generators `x_{γ_r}(-j)`; position `p` carries color `p % rank + 1` and
//! sits at degree `p / rank + 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of configurations a single enumeration may
/// produce before it is abandoned with [`Error::ResourceLimit`].
pub const DEFAULT_OUTPUT_CAP: usize = 20_000_000;

/// The tuple `(k_0, ..., k_rank)` of multiplicities of fundamental weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct LevelComposition {
    parts: Vec<u32>,
}

impl LevelComposition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::ZeroRank);
        }
        Ok(Self { parts })
    }

    /// Builds a composition and checks it has `rank + 1` parts.
    pub fn with_rank(rank: usize, parts: Vec<u32>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if parts.len() != rank + 1 {
            return Err(Error::PartCount {
                expected: rank + 1,
                got: parts.len(),
            });
        }
        Ok(Self { parts })
    }

    /// `(level, 0, ..., 0)`.
    pub fn vacuum(rank: usize, level: u32) -> Result<Self> {
        let mut parts = vec![0; rank + 1];
        parts[0] = level;
        Self::with_rank(rank, parts)
    }

    pub fn rank(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn level(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> u32 {
        self.parts[i]
    }

    /// `(k_0, ..., k_{rank-1})`, the parts that shift weights.
    pub fn leading_parts(&self) -> &[u32] {
        &self.parts[..self.rank()]
    }

    /// Upper bounds `k_0 + ... + k_j` of the initial conditions, `j < rank`.
    pub fn initial_bounds(&self) -> Vec<u32> {
        self.leading_parts()
            .iter()
            .scan(0, |acc, &k| {
                *acc += k;
                Some(*acc)
            })
            .collect()
    }

    /// All compositions of `level` into `rank + 1` parts, in lexicographic order.
    pub fn all(rank: usize, level: u32) -> Result<Vec<Self>> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        fn rec(slots: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if slots == 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for v in 0..=left {
                cur.push(v);
                rec(slots - 1, left - v, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(rank + 1, level, &mut Vec::new(), &mut out);
        Ok(out.into_iter().map(|parts| Self { parts }).collect())
    }
}

impl TryFrom<Vec<u32>> for LevelComposition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<LevelComposition> for Vec<u32> {
    fn from(k: LevelComposition) -> Self {
        k.parts
    }
}

impl fmt::Display for LevelComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.parts)
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// Exponent sequence of a monomial, kept with trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Configuration {
    entries: Vec<u32>,
}

impl Configuration {
    pub fn new(mut entries: Vec<u32>) -> Self {
        trim_trailing_zeros(&mut entries);
        Self { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at `pos`, zero past the support.
    pub fn get(&self, pos: usize) -> u32 {
        self.entries.get(pos).copied().unwrap_or(0)
    }

    pub fn particle_count(&self) -> u64 {
        self.entries.iter().map(|&a| u64::from(a)).sum()
    }

    /// The first `rank` entries, zero padded.
    pub fn first_block(&self, rank: usize) -> Vec<u32> {
        (0..rank).map(|p| self.get(p)).collect()
    }
}

impl From<Vec<u32>> for Configuration {
    fn from(entries: Vec<u32>) -> Self {
        Self::new(entries)
    }
}

impl From<Configuration> for Vec<u32> {
    fn from(c: Configuration) -> Self {
        c.entries
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.entries)
    }
}

pub(crate) fn trim_trailing_zeros(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Color weight `(n_1, ..., n_rank)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    components: Vec<i64>,
}

impl WeightVector {
    pub fn new(components: Vec<i64>) -> Self {
        Self { components }
    }

    pub fn zero(rank: usize) -> Self {
        Self {
            components: vec![0; rank],
        }
    }

    pub fn components(&self) -> &[i64] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn total(&self) -> i64 {
        self.components.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.components.iter().all(|&c| c >= 0)
    }

    /// Componentwise `self - other` for a block of `u32` offsets.
    pub fn minus(&self, offsets: &[u32]) -> Self {
        debug_assert_eq!(offsets.len(), self.components.len());
        Self {
            components: self
                .components
                .iter()
                .zip(offsets)
                .map(|(&c, &o)| c - i64::from(o))
                .collect(),
        }
    }

    pub fn plus(&self, offsets: &[u32]) -> Self {
        Self {
            components: self
                .components
                .iter()
                .zip(offsets)
                .map(|(&c, &o)| c + i64::from(o))
                .collect(),
        }
    }

    /// Ordering used for canonical output: total first, then lexicographic.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total(), &self.components).cmp(&(other.total(), &other.components))
    }

    /// All nonnegative weights of the given rank with `total <= max_total`,
    /// in canonical order.
    pub fn all_up_to(rank: usize, max_total: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for total in 0..=max_total {
            // lexicographic order of compositions of `total` into `rank` parts
            let mut cur = Vec::with_capacity(rank);
            fill_weights(rank, total, &mut cur, &mut out);
        }
        out
    }
}

fn fill_weights(slots: usize, left: u32, cur: &mut Vec<i64>, out: &mut Vec<WeightVector>) {
    if slots == 1 {
        cur.push(i64::from(left));
        out.push(WeightVector::new(cur.clone()));
        cur.pop();
        return;
    }
    for v in 0..=left {
        cur.push(i64::from(v));
        fill_weights(slots - 1, left - v, cur, out);
        cur.pop();
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.components)
    }
}

/// A homogeneous component: degree and weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grade {
    pub degree: u64,
    pub weight: WeightVector,
}

impl Grade {
    pub fn new(degree: u64, weight: WeightVector) -> Self {
        Self { degree, weight }
    }

    pub fn of(cfg: &Configuration, rank: usize) -> Self {
        Self::new(degree(cfg, rank), weight(cfg, rank))
    }
}

/// Sum of `j * a` over all positions, with `j` the degree index of the position.
pub fn degree(cfg: &Configuration, rank: usize) -> u64 {
    cfg.entries
        .iter()
        .enumerate()
        .map(|(p, &a)| (p / rank + 1) as u64 * u64::from(a))
        .sum()
}

/// Per-color particle counts.
pub fn weight(cfg: &Configuration, rank: usize) -> WeightVector {
    let mut components = vec![0i64; rank];
    for (p, &a) in cfg.entries.iter().enumerate() {
        components[p % rank] += i64::from(a);
    }
    WeightVector::new(components)
}

/// Every window of `rank + 1` consecutive entries sums to at most `level`.
pub fn satisfies_difference(cfg: &Configuration, rank: usize, level: u32) -> bool {
    let width = rank + 1;
    let e = &cfg.entries;
    let mut sum: u64 = 0;
    for (p, &a) in e.iter().enumerate() {
        sum += u64::from(a);
        if p >= width {
            sum -= u64::from(e[p - width]);
        }
        if sum > u64::from(level) {
            return false;
        }
    }
    true
}

/// `a_0 + ... + a_j <= k_0 + ... + k_j` for every `j < rank`.
pub fn satisfies_initial(cfg: &Configuration, k: &LevelComposition) -> bool {
    partial_sums_within(cfg, &k.initial_bounds())
}

pub(crate) fn partial_sums_within(cfg: &Configuration, bounds: &[u32]) -> bool {
    let mut acc: u64 = 0;
    for (j, &b) in bounds.iter().enumerate() {
        acc += u64::from(cfg.get(j));
        if acc > u64::from(b) {
            return false;
        }
    }
    true
}

pub fn is_admissible(cfg: &Configuration, k: &LevelComposition) -> bool {
    satisfies_initial(cfg, k) && satisfies_difference(cfg, k.rank(), k.level())
}

struct Search<'a, F> {
    rank: usize,
    level: u32,
    bounds: Vec<u32>,
    buf: Vec<u32>,
    emitted: usize,
    cap: usize,
    visit: &'a mut F,
}

impl<F: FnMut(&[u32])> Search<'_, F> {
    fn run(&mut self, pos: usize, remaining: u64, prefix_sum: u32) -> Result<()> {
        let j = (pos / self.rank + 1) as u64;
        if remaining < j {
            self.emitted += 1;
            if self.emitted > self.cap {
                return Err(Error::ResourceLimit { cap: self.cap });
            }
            let mut end = self.buf.len();
            while end > 0 && self.buf[end - 1] == 0 {
                end -= 1;
            }
            (self.visit)(&self.buf[..end]);
            return Ok(());
        }
        let window: u32 = self.buf[pos.saturating_sub(self.rank)..pos].iter().sum();
        let mut max = u64::from(self.level - window).min(remaining / j);
        if pos < self.rank {
            max = max.min(u64::from(self.bounds[pos] - prefix_sum));
        }
        for v in 0..=max as u32 {
            self.buf.push(v);
            let r = self.run(pos + 1, remaining - u64::from(v) * j, prefix_sum + v);
            self.buf.pop();
            r?;
        }
        Ok(())
    }
}

/// Visits every admissible configuration of degree at most `max_degree`
/// exactly once, in depth-first order. The slice passed to `visit` is
/// trailing-zero trimmed.
pub fn for_each_admissible<F: FnMut(&[u32])>(
    k: &LevelComposition,
    max_degree: u64,
    cap: usize,
    mut visit: F,
) -> Result<usize> {
    let mut search = Search {
        rank: k.rank(),
        level: k.level(),
        bounds: k.initial_bounds(),
        buf: Vec::new(),
        emitted: 0,
        cap,
        visit: &mut visit,
    };
    search.run(0, max_degree, 0)?;
    Ok(search.emitted)
}

/// Admissible configurations with degree `<= max_degree`, ordered by degree and
/// then lexicographically by entries.
pub fn enumerate_admissible(k: &LevelComposition, max_degree: u64) -> Result<Vec<Configuration>> {
    enumerate_admissible_capped(k, max_degree, DEFAULT_OUTPUT_CAP)
}

pub fn enumerate_admissible_capped(
    k: &LevelComposition,
    max_degree: u64,
    cap: usize,
) -> Result<Vec<Configuration>> {
    let rank = k.rank();
    let mut out: Vec<(u64, Configuration)> = Vec::new();
    for_each_admissible(k, max_degree, cap, |entries| {
        let cfg = Configuration {
            entries: entries.to_vec(),
        };
        out.push((degree(&cfg, rank), cfg));
    })?;
    out.sort_unstable();
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

/// Admissible configurations grouped by grade; each list keeps the canonical order.
pub fn enumerate_by_grade(
    k: &LevelComposition,
    max_degree: u64,
) -> Result<BTreeMap<Grade, Vec<Configuration>>> {
    enumerate_by_grade_capped(k, max_degree, DEFAULT_OUTPUT_CAP)
}

pub fn enumerate_by_grade_capped(
    k: &LevelComposition,
    max_degree: u64,
    cap: usize,
) -> Result<BTreeMap<Grade, Vec<Configuration>>> {
    let rank = k.rank();
    let mut map: BTreeMap<Grade, Vec<Configuration>> = BTreeMap::new();
    for cfg in enumerate_admissible_capped(k, max_degree, cap)? {
        map.entry(Grade::of(&cfg, rank)).or_default().push(cfg);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[u32]) -> LevelComposition {
        LevelComposition::new(parts.to_vec()).unwrap()
    }

    fn cfg(entries: &[u32]) -> Configuration {
        Configuration::new(entries.to_vec())
    }

    /// Every sequence with degree `<= max_degree`, no admissibility filter.
    fn naive_sequences(rank: usize, max_degree: u64) -> Vec<Configuration> {
        let len = rank * max_degree as usize;
        let mut out = vec![Vec::new()];
        for p in 0..len {
            let j = (p / rank + 1) as u64;
            let mut next = Vec::new();
            for seq in out {
                let used: u64 = seq
                    .iter()
                    .enumerate()
                    .map(|(q, &a): (usize, &u32)| (q / rank + 1) as u64 * u64::from(a))
                    .sum();
                let mut v = 0u32;
                while used + u64::from(v) * j <= max_degree {
                    let mut s = seq.clone();
                    s.push(v);
                    next.push(s);
                    v += 1;
                }
            }
            out = next;
        }
        out.into_iter().map(Configuration::new).collect()
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree(&Configuration::empty(), 3), 0);
        assert_eq!(degree(&cfg(&[1, 0, 2]), 2), 5);
        assert_eq!(degree(&cfg(&[0, 1, 0, 1]), 1), 6);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&Configuration::empty(), 2), WeightVector::zero(2));
        assert_eq!(weight(&cfg(&[1, 0, 2]), 2), WeightVector::new(vec![3, 0]));
        assert_eq!(weight(&cfg(&[0, 1]), 2), WeightVector::new(vec![0, 1]));
    }

    #[test]
    fn difference_examples() {
        assert!(satisfies_difference(&Configuration::empty(), 3, 0));
        assert!(!satisfies_difference(&cfg(&[1, 1]), 1, 1));
        assert!(satisfies_difference(&cfg(&[1, 0, 1]), 1, 1));
    }

    #[test]
    fn initial_examples() {
        assert!(satisfies_initial(
            &Configuration::empty(),
            &comp(&[0, 0, 3])
        ));
        assert!(satisfies_initial(&cfg(&[1]), &comp(&[1, 0])));
        assert!(!satisfies_initial(&cfg(&[2]), &comp(&[1, 0])));
        assert!(!satisfies_initial(&cfg(&[1]), &comp(&[0, 1])));
    }

    #[test]
    fn admissible_examples() {
        assert!(is_admissible(&Configuration::empty(), &comp(&[0, 2, 1])));
        assert!(is_admissible(&cfg(&[1, 0, 1]), &comp(&[1, 0])));
        assert!(!is_admissible(&cfg(&[2, 1]), &comp(&[2, 0, 0])));
    }

    #[test]
    fn canonical_form_trims() {
        assert_eq!(cfg(&[1, 0, 0]).entries(), &[1]);
        assert!(cfg(&[0, 0]).is_empty());
        let c: Configuration = serde_json::from_str("[0,2,0]").unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), "[0,2]");
    }

    #[test]
    fn composition_validation() {
        assert!(LevelComposition::new(vec![1]).is_err());
        assert_eq!(
            LevelComposition::with_rank(2, vec![1, 1]),
            Err(Error::PartCount {
                expected: 3,
                got: 2
            })
        );
        assert!(serde_json::from_str::<LevelComposition>("[3]").is_err());
        let k = comp(&[1, 2, 0]);
        assert_eq!(k.level(), 3);
        assert_eq!(k.initial_bounds(), vec![1, 3]);
        assert_eq!(LevelComposition::all(2, 2).unwrap().len(), 6);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate_admissible(&comp(&[1, 0]), 0).unwrap(),
            vec![Configuration::empty()]
        );
        let got = enumerate_admissible(&comp(&[1, 0]), 4).unwrap();
        let want: Vec<Configuration> = vec![
            cfg(&[]),
            cfg(&[1]),
            cfg(&[0, 1]),
            cfg(&[0, 0, 1]),
            cfg(&[0, 0, 0, 1]),
            cfg(&[1, 0, 1]),
        ];
        assert_eq!(got, want);
        assert_eq!(
            enumerate_admissible(&comp(&[0, 1]), 2).unwrap(),
            vec![cfg(&[]), cfg(&[0, 1])]
        );
    }

    #[test]
    fn enumerate_by_grade_examples() {
        let g = enumerate_by_grade(&comp(&[1, 0]), 5).unwrap();
        assert_eq!(
            g[&Grade::new(3, WeightVector::new(vec![1]))],
            vec![cfg(&[0, 0, 1])]
        );
        assert_eq!(
            g[&Grade::new(0, WeightVector::new(vec![0]))],
            vec![Configuration::empty()]
        );
        let g = enumerate_by_grade(&comp(&[2, 0, 0]), 3).unwrap();
        assert_eq!(
            g[&Grade::new(2, WeightVector::new(vec![2, 0]))],
            vec![cfg(&[2])]
        );
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        for rank in 1..=3 {
            for level in 0..=3 {
                let max_degree = if rank == 3 { 4 } else { 5 };
                let naive = naive_sequences(rank, max_degree);
                for k in LevelComposition::all(rank, level).unwrap() {
                    let mut want: Vec<(u64, Configuration)> = naive
                        .iter()
                        .filter(|c| is_admissible(c, &k))
                        .map(|c| (degree(c, rank), c.clone()))
                        .collect();
                    want.sort();
                    let want: Vec<_> = want.into_iter().map(|(_, c)| c).collect();
                    assert_eq!(enumerate_admissible(&k, max_degree).unwrap(), want, "{k}");
                }
            }
        }
    }

    #[test]
    fn enumeration_is_prefix_closed() {
        let k = comp(&[1, 1, 0]);
        let big = enumerate_admissible(&k, 7).unwrap();
        for m in 0..7 {
            let small = enumerate_admissible(&k, m).unwrap();
            let restricted: Vec<_> = big.iter().filter(|c| degree(c, 2) <= m).cloned().collect();
            assert_eq!(small, restricted);
        }
    }

    #[test]
    fn output_cap_is_enforced() {
        let k = comp(&[2, 0, 0]);
        let n = enumerate_admissible(&k, 4).unwrap().len();
        assert!(enumerate_admissible_capped(&k, 4, n).is_ok());
        assert_eq!(
            enumerate_admissible_capped(&k, 4, n - 1),
            Err(Error::ResourceLimit { cap: n - 1 })
        );
    }

    #[test]
    fn degree_dominates_particle_count() {
        for k in LevelComposition::all(2, 2).unwrap() {
            for c in enumerate_admissible(&k, 8).unwrap() {
                assert!(degree(&c, 2) as i64 >= weight(&c, 2).total());
                assert_eq!(weight(&c, 2).total() as u64, c.particle_count());
            }
        }
    }

    #[test]
    fn weights_up_to_are_canonical() {
        let ws = WeightVector::all_up_to(2, 2);
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(
            shown,
            ["(0,0)", "(0,1)", "(1,0)", "(0,2)", "(1,1)", "(2,0)"]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn trimming_is_idempotent(v in proptest::collection::vec(0u32..4, 0..12)) {
                let once = Configuration::new(v);
                let twice = Configuration::new(once.entries().to_vec());
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn padding_zeros_keeps_predicates(
                v in proptest::collection::vec(0u32..4, 0..10),
                pad in 0usize..6,
                rank in 1usize..4,
                parts in proptest::collection::vec(0u32..3, 4),
            ) {
                let k = LevelComposition::new(parts[..=rank].to_vec()).unwrap();
                let base = Configuration::new(v.clone());
                let mut padded = v;
                padded.extend(std::iter::repeat_n(0, pad));
                let raw = Configuration { entries: padded };
                prop_assert_eq!(
                    satisfies_difference(&base, rank, k.level()),
                    satisfies_difference(&raw, rank, k.level())
                );
                prop_assert_eq!(satisfies_initial(&base, &k), satisfies_initial(&raw, &k));
            }
        }
    }
}
