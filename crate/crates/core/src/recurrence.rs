//! Characters by enumeration, the alternating recurrence system they satisfy,
//! and the recursive coefficient solver checked against enumeration.
//!
//! Coefficient series `A_K^n(q)` are indexed by a composition `K` and a weight
//! `n`. Stripping the degree-one layer `a = (a_0, ..., a_{ℓ-1})` of an
//! admissible configuration leaves an admissible configuration for
//! `(k - |a|, a_0, ..., a_{ℓ-1})` shifted down by one degree, which is what
//! both the identity checker and the solver exploit.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    for_each_admissible, satisfies_initial, Configuration, LevelComposition, WeightVector,
    DEFAULT_OUTPUT_CAP,
};
use crate::error::{Error, Result};
use crate::index_sets::{apply_index_set, cyclic_shift, d_family, IndexSet};
use crate::qseries::{geometric_factor, shift_substitute, Character, QPolynomial};

/// Character of `k` through `q^order` by counting admissible configurations.
pub fn compute_character(k: &LevelComposition, order: u32) -> Result<Character> {
    compute_character_capped(k, order, DEFAULT_OUTPUT_CAP)
}

pub fn compute_character_capped(k: &LevelComposition, order: u32, cap: usize) -> Result<Character> {
    let rank = k.rank();
    let mut ch = Character::new(k.clone(), order);
    let mut failure = None;
    for_each_admissible(k, u64::from(order), cap, |entries| {
        if failure.is_some() {
            return;
        }
        let mut weight = vec![0i64; rank];
        let mut degree = 0u64;
        for (p, &a) in entries.iter().enumerate() {
            weight[p % rank] += i64::from(a);
            degree += (p / rank + 1) as u64 * u64::from(a);
        }
        if let Err(e) = ch.bump(WeightVector::new(weight), degree, 1) {
            failure = Some(e);
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(ch),
    }
}

/// Memoised enumeration characters at one truncation order.
#[derive(Debug)]
pub struct OracleTable {
    order: u32,
    cap: usize,
    table: HashMap<LevelComposition, Character>,
}

impl OracleTable {
    pub fn new(order: u32) -> Self {
        Self::with_cap(order, DEFAULT_OUTPUT_CAP)
    }

    pub fn with_cap(order: u32, cap: usize) -> Self {
        Self {
            order,
            cap,
            table: HashMap::new(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn character(&mut self, k: &LevelComposition) -> Result<&Character> {
        if !self.table.contains_key(k) {
            let ch = compute_character_capped(k, self.order, self.cap)?;
            self.table.insert(k.clone(), ch);
        }
        Ok(&self.table[k])
    }
}

/// `Σ_{I ∈ D(K)} (-1)^{|I|} χ(W_I)` with characters from `provider`.
pub fn recurrence_lhs_with<P>(
    k: &LevelComposition,
    order: u32,
    provider: &mut P,
) -> Result<Character>
where
    P: FnMut(&LevelComposition) -> Result<Character>,
{
    let mut acc = Character::new(k.clone(), order);
    for set in d_family(k).iter() {
        let ch = provider(&apply_index_set(k, set)?)?;
        let sign = if set.len() % 2 == 0 { 1 } else { -1 };
        acc = acc.add_scaled(&ch, sign)?;
    }
    Ok(acc)
}

pub fn recurrence_lhs(k: &LevelComposition, order: u32) -> Result<Character> {
    let mut oracle = OracleTable::new(order);
    recurrence_lhs_with(k, order, &mut |c| oracle.character(c).cloned())
}

/// `(z_1 q)^{k_0} ... (z_ℓ q)^{k_{ℓ-1}} χ(W_{shift K})(z q; q)`.
pub fn recurrence_rhs_with<P>(k: &LevelComposition, provider: &mut P) -> Result<Character>
where
    P: FnMut(&LevelComposition) -> Result<Character>,
{
    shift_substitute(&provider(&cyclic_shift(k))?, k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    #[serde(rename = "K")]
    pub composition: LevelComposition,
    pub index_sets: Vec<IndexSet>,
    pub weight: WeightVector,
    pub q_power: u64,
    pub lhs: i64,
    pub rhs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionOutcome {
    #[serde(rename = "K")]
    pub composition: LevelComposition,
    pub pass: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ell: usize,
    pub k: u32,
    #[serde(rename = "M")]
    pub order: u32,
    pub all_pass: bool,
    pub compositions: Vec<CompositionOutcome>,
}

impl VerificationReport {
    fn from_outcomes(
        ell: usize,
        k: u32,
        order: u32,
        compositions: Vec<CompositionOutcome>,
    ) -> Self {
        Self {
            ell,
            k,
            order,
            all_pass: compositions.iter().all(|c| c.pass),
            compositions,
        }
    }
}

/// Checks the recurrence for a single composition.
pub fn verify_recurrence_for<P>(
    k: &LevelComposition,
    order: u32,
    provider: &mut P,
) -> Result<CompositionOutcome>
where
    P: FnMut(&LevelComposition) -> Result<Character>,
{
    let lhs = recurrence_lhs_with(k, order, provider)?;
    let rhs = recurrence_rhs_with(k, provider)?;
    let counterexample = lhs
        .first_mismatch(&rhs)
        .map(|(weight, q_power, l, r)| Counterexample {
            composition: k.clone(),
            index_sets: d_family(k).iter().cloned().collect(),
            weight,
            q_power,
            lhs: l,
            rhs: r,
        });
    Ok(CompositionOutcome {
        composition: k.clone(),
        pass: counterexample.is_none(),
        counterexample,
    })
}

/// The recurrence over every composition of `level` into `rank + 1` parts,
/// characters supplied by `provider`.
pub fn verify_recurrence_with<P>(
    rank: usize,
    level: u32,
    order: u32,
    provider: &mut P,
) -> Result<VerificationReport>
where
    P: FnMut(&LevelComposition) -> Result<Character>,
{
    let outcomes = LevelComposition::all(rank, level)?
        .iter()
        .map(|k| verify_recurrence_for(k, order, provider))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_outcomes(
        rank, level, order, outcomes,
    ))
}

pub fn verify_recurrence(rank: usize, level: u32, order: u32) -> Result<VerificationReport> {
    let mut oracle = OracleTable::new(order);
    verify_recurrence_with(rank, level, order, &mut |c| oracle.character(c).cloned())
}

/// Degree-one layer `(a_0, ..., a_{ℓ-1})` of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FirstBlock {
    entries: Vec<u32>,
}

impl FirstBlock {
    pub fn new(entries: Vec<u32>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn sum(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0)
    }

    /// One-block initial conditions of `k`.
    pub fn in_region(&self, k: &LevelComposition) -> bool {
        satisfies_initial(&Configuration::new(self.entries.clone()), k)
    }

    /// `(k - |a|, a_0, ..., a_{ℓ-1})`, the composition governing what remains
    /// after this block is stripped.
    pub fn residual_composition(&self, level: u32) -> LevelComposition {
        let mut parts = Vec::with_capacity(self.entries.len() + 1);
        parts.push(level - self.sum());
        parts.extend_from_slice(&self.entries);
        LevelComposition::new(parts).expect("block has at least one entry")
    }
}

/// All blocks satisfying the one-block initial conditions of `k`, ordered by
/// block sum and then colexicographically.
pub fn enumerate_first_blocks(k: &LevelComposition) -> Vec<FirstBlock> {
    let bounds = k.initial_bounds();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(bounds.len());
    fn rec(bounds: &[u32], used: u32, cur: &mut Vec<u32>, out: &mut Vec<FirstBlock>) {
        let j = cur.len();
        if j == bounds.len() {
            out.push(FirstBlock::new(cur.clone()));
            return;
        }
        for v in 0..=(bounds[j] - used) {
            cur.push(v);
            rec(bounds, used + v, cur, out);
            cur.pop();
        }
    }
    rec(&bounds, 0, &mut cur, &mut out);
    out.sort_by(|a, b| {
        (a.sum(), a.entries.iter().rev().collect::<Vec<_>>())
            .cmp(&(b.sum(), b.entries.iter().rev().collect::<Vec<_>>()))
    });
    out
}

/// Memo-table key for the solver.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolverKey {
    pub composition: LevelComposition,
    pub weight: WeightVector,
}

/// Memoised recursion for `A_K^n(q)`:
///
/// `A_K^n = q^s/(1-q^s) ( Σ_{a ∈ B_K, a≠0} A_{K'(a)}^{n-a} + q^s Σ_{a ∈ B_{(k,0..0)} \ B_K, a≠0} A_{K'(a)}^{n-a} )`
///
/// with `s = total(n)` and `K'(a) = (k - |a|, a)`. Every recursive call has a
/// strictly smaller total weight. A single solver instance is confined to one
/// thread, so each key is computed at most once.
#[derive(Debug)]
pub struct CoefficientSolver {
    order: u32,
    memo: HashMap<SolverKey, QPolynomial>,
    blocks: HashMap<(usize, u32), Vec<FirstBlock>>,
}

impl CoefficientSolver {
    pub fn new(order: u32) -> Self {
        Self {
            order,
            memo: HashMap::new(),
            blocks: HashMap::new(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of memoised keys.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn nonzero_vacuum_blocks(&mut self, rank: usize, level: u32) -> Result<Vec<FirstBlock>> {
        if let Some(b) = self.blocks.get(&(rank, level)) {
            return Ok(b.clone());
        }
        let vacuum = LevelComposition::vacuum(rank, level)?;
        let blocks: Vec<FirstBlock> = enumerate_first_blocks(&vacuum)
            .into_iter()
            .filter(|a| !a.is_zero())
            .collect();
        self.blocks.insert((rank, level), blocks.clone());
        Ok(blocks)
    }

    pub fn coefficient(&mut self, k: &LevelComposition, n: &WeightVector) -> Result<QPolynomial> {
        if n.rank() != k.rank() {
            return Err(Error::RankMismatch {
                expected: k.rank(),
                got: n.rank(),
            });
        }
        if !n.is_nonnegative() {
            return Ok(QPolynomial::zero(self.order));
        }
        if n.is_zero() {
            return Ok(QPolynomial::one(self.order));
        }
        let total = n.total() as u64;
        if total > u64::from(self.order) {
            return Ok(QPolynomial::zero(self.order));
        }
        let key = SolverKey {
            composition: k.clone(),
            weight: n.clone(),
        };
        if let Some(p) = self.memo.get(&key) {
            return Ok(p.clone());
        }

        let mut inside = QPolynomial::zero(self.order);
        let mut outside = QPolynomial::zero(self.order);
        for a in self.nonzero_vacuum_blocks(k.rank(), k.level())? {
            let rest = n.minus(a.entries());
            if !rest.is_nonnegative() {
                continue;
            }
            let term = self.coefficient(&a.residual_composition(k.level()), &rest)?;
            if a.in_region(k) {
                inside = inside.add(&term)?;
            } else {
                outside = outside.add(&term)?;
            }
        }
        let bracket = inside.add(&outside.shift_up(total))?;
        let value = geometric_factor(total, self.order)?.mul(&bracket)?;
        self.memo.insert(key, value.clone());
        Ok(value)
    }

    pub fn character(&mut self, k: &LevelComposition) -> Result<Character> {
        let mut ch = Character::new(k.clone(), self.order);
        for n in WeightVector::all_up_to(k.rank(), self.order) {
            let p = self.coefficient(k, &n)?;
            ch.set(n, p)?;
        }
        Ok(ch)
    }
}

pub fn solve_coefficient(
    k: &LevelComposition,
    n: &WeightVector,
    order: u32,
) -> Result<QPolynomial> {
    CoefficientSolver::new(order).coefficient(k, n)
}

pub fn solve_character(k: &LevelComposition, order: u32) -> Result<Character> {
    CoefficientSolver::new(order).character(k)
}

/// Checks `A_K^n = q^{total(n)} Σ_{a ∈ B_K} A_{K'(a)}^{n-a}` using enumeration
/// values on both sides, the `a = 0` term included.
pub fn verify_equality_identity_with(
    oracle: &mut OracleTable,
    k: &LevelComposition,
    n: &WeightVector,
) -> Result<bool> {
    if n.rank() != k.rank() || !n.is_nonnegative() {
        return Err(Error::Precondition(format!(
            "weight {n} must be nonnegative of rank {}",
            k.rank()
        )));
    }
    let order = oracle.order();
    let lhs = oracle.character(k)?.get(n);
    let mut sum = QPolynomial::zero(order);
    for a in enumerate_first_blocks(k) {
        let rest = n.minus(a.entries());
        if !rest.is_nonnegative() {
            continue;
        }
        let term = oracle
            .character(&a.residual_composition(k.level()))?
            .get(&rest);
        sum = sum.add(&term)?;
    }
    Ok(lhs == sum.shift_up(n.total() as u64))
}

pub fn verify_equality_identity(
    k: &LevelComposition,
    n: &WeightVector,
    order: u32,
) -> Result<bool> {
    verify_equality_identity_with(&mut OracleTable::new(order), k, n)
}

/// `Σ_{I ∈ D(K), I ≠ ∅, a ∈ B_{K_I}} (-1)^{|I|-1}`, the multiplicity with which
/// block `a` appears after substituting the identity for every `I ≠ ∅`.
pub fn block_multiplicity(k: &LevelComposition, a: &FirstBlock) -> Result<i64> {
    let mut total = 0;
    for set in d_family(k).iter().filter(|s| !s.is_empty()) {
        if a.in_region(&apply_index_set(k, set)?) {
            total += if set.len() % 2 == 1 { 1 } else { -1 };
        }
    }
    Ok(total)
}

/// Blocks of `B_K` whose multiplicity is wrong: 1 expected for every block
/// except `(k_0, ..., k_{ℓ-1})`, which must get 0.
pub fn block_cancellation_violations(k: &LevelComposition) -> Result<Vec<(FirstBlock, i64)>> {
    let top = k.leading_parts();
    let mut bad = Vec::new();
    for a in enumerate_first_blocks(k) {
        let want = if a.entries() == top { 0 } else { 1 };
        let got = block_multiplicity(k, &a)?;
        if got != want {
            bad.push((a, got));
        }
    }
    Ok(bad)
}
