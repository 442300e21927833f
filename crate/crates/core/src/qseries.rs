//! Truncated integer power series in `q` and multivariate characters
//! `Σ_n A^n(q) z^n` stored as sparse tables of such series.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{LevelComposition, WeightVector};
use crate::error::{Error, Result};

/// `c_0 + c_1 q + ... + c_M q^M`, exact through `q^M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPolynomial {
    #[serde(rename = "M")]
    order: u32,
    coeffs: Vec<i64>,
}

impl QPolynomial {
    pub fn zero(order: u32) -> Self {
        Self {
            order,
            coeffs: vec![0; order as usize + 1],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::monomial(0, 1, order)
    }

    /// `c q^d`, clipped when `d > order`.
    pub fn monomial(d: u64, c: i64, order: u32) -> Self {
        let mut p = Self::zero(order);
        if d <= u64::from(order) {
            p.coeffs[d as usize] = c;
        }
        p
    }

    /// Coefficients beyond `order` are dropped; missing ones are zero.
    pub fn from_coeffs(mut coeffs: Vec<i64>, order: u32) -> Self {
        coeffs.resize(order as usize + 1, 0);
        Self { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, d: u64) -> i64 {
        self.coeffs.get(d as usize).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Lowest power with a nonzero coefficient; `None` for the zero series.
    pub fn valuation(&self) -> Option<u64> {
        self.coeffs.iter().position(|&c| c != 0).map(|d| d as u64)
    }

    pub fn truncate(&self, order: u32) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order.min(self.order))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, i64::checked_sub)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        let order = self.order.min(other.order);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .take(order as usize + 1)
            .map(|(&a, &b)| f(a, b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { order, coeffs })
    }

    /// Cauchy product clipped at the smaller truncation order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = self.order.min(other.order) as usize;
        let mut coeffs = vec![0i64; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                let t = a.checked_mul(b).ok_or(Error::Overflow)?;
                coeffs[i + j] = coeffs[i + j].checked_add(t).ok_or(Error::Overflow)?;
            }
        }
        Ok(Self {
            order: order as u32,
            coeffs,
        })
    }

    /// Multiplication by `q^s`.
    pub fn shift_up(&self, s: u64) -> Self {
        let mut p = Self::zero(self.order);
        let len = self.coeffs.len();
        if (s as usize) < len {
            p.coeffs[s as usize..].copy_from_slice(&self.coeffs[..len - s as usize]);
        }
        p
    }

    pub fn scale(&self, c: i64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| a.checked_mul(c).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.unsigned_abs();
            match (d, mag) {
                (0, _) => write!(f, "{sign}{mag}")?,
                (_, 1) => write!(f, "{sign}q^{d}")?,
                _ => write!(f, "{sign}{mag}q^{d}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order + 1)
    }
}

/// `q^n + q^{2n} + ...` through `q^order`, the expansion of `q^n / (1 - q^n)`.
pub fn geometric_factor(n: u64, order: u32) -> Result<QPolynomial> {
    if n == 0 {
        return Err(Error::ZeroExponent);
    }
    let mut p = QPolynomial::zero(order);
    let mut d = n;
    while d <= u64::from(order) {
        p.coeffs[d as usize] = 1;
        d += n;
    }
    Ok(p)
}

/// The formal character of one composition, truncated at `q^order`.
///
/// Absent weights stand for the zero series; stored series are never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    composition: LevelComposition,
    order: u32,
    table: BTreeMap<WeightVector, QPolynomial>,
}

#[derive(Serialize, Deserialize)]
struct CharacterRepr {
    #[serde(rename = "K")]
    composition: LevelComposition,
    #[serde(rename = "M")]
    order: u32,
    table: Vec<CharacterEntry>,
}

#[derive(Serialize, Deserialize)]
struct CharacterEntry {
    n: WeightVector,
    poly: QPolynomial,
}

impl Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let table = self
            .entries()
            .into_iter()
            .map(|(n, poly)| CharacterEntry {
                n: n.clone(),
                poly: poly.clone(),
            })
            .collect();
        CharacterRepr {
            composition: self.composition.clone(),
            order: self.order,
            table,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CharacterRepr::deserialize(d)?;
        let mut ch = Character::new(repr.composition, repr.order);
        for e in repr.table {
            ch.set(e.n, e.poly).map_err(serde::de::Error::custom)?;
        }
        Ok(ch)
    }
}

impl Character {
    pub fn new(composition: LevelComposition, order: u32) -> Self {
        Self {
            composition,
            order,
            table: BTreeMap::new(),
        }
    }

    pub fn composition(&self) -> &LevelComposition {
        &self.composition
    }

    pub fn rank(&self) -> usize {
        self.composition.rank()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The series at weight `n`; zero for absent or negative weights.
    pub fn get(&self, n: &WeightVector) -> QPolynomial {
        self.table
            .get(n)
            .cloned()
            .unwrap_or_else(|| QPolynomial::zero(self.order))
    }

    /// Stores `poly` truncated to the character's order, dropping zeros.
    pub fn set(&mut self, n: WeightVector, poly: QPolynomial) -> Result<()> {
        self.check_weight(&n)?;
        let poly = poly.truncate(self.order);
        if poly.is_zero() {
            self.table.remove(&n);
        } else {
            self.table.insert(n, poly);
        }
        Ok(())
    }

    /// Adds `c q^d` at weight `n`.
    pub fn bump(&mut self, n: WeightVector, d: u64, c: i64) -> Result<()> {
        self.check_weight(&n)?;
        if d > u64::from(self.order) {
            return Ok(());
        }
        let p = self
            .table
            .entry(n.clone())
            .or_insert_with(|| QPolynomial::zero(self.order));
        p.coeffs[d as usize] = p.coeffs[d as usize].checked_add(c).ok_or(Error::Overflow)?;
        if p.is_zero() {
            self.table.remove(&n);
        }
        Ok(())
    }

    fn check_weight(&self, n: &WeightVector) -> Result<()> {
        if n.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: n.rank(),
            });
        }
        if !n.is_nonnegative() {
            return Err(Error::Precondition(format!("negative weight {n}")));
        }
        Ok(())
    }

    /// Stored weights in canonical order (total, then lexicographic).
    pub fn entries(&self) -> Vec<(&WeightVector, &QPolynomial)> {
        let mut v: Vec<_> = self.table.iter().collect();
        v.sort_by(|a, b| a.0.canonical_cmp(b.0));
        v
    }

    pub fn weights(&self) -> impl Iterator<Item = &WeightVector> {
        self.table.keys()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `self + sign * other` over the common truncation order; compositions
    /// are not compared, the result keeps `self`'s.
    pub fn add_scaled(&self, other: &Character, sign: i64) -> Result<Character> {
        if other.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: other.rank(),
            });
        }
        let order = self.order.min(other.order);
        let mut out = Character::new(self.composition.clone(), order);
        for (n, p) in &self.table {
            out.set(n.clone(), p.truncate(order))?;
        }
        for (n, p) in &other.table {
            let sum = out.get(n).add(&p.scale(sign)?)?;
            out.set(n.clone(), sum)?;
        }
        Ok(out)
    }

    /// The `z_i = 1` specialisation.
    pub fn specialize_unit(&self) -> Result<QPolynomial> {
        self.table
            .values()
            .try_fold(QPolynomial::zero(self.order), |acc, p| acc.add(p))
    }

    /// First `(weight, power, lhs, rhs)` at which the tables differ, scanning
    /// weights in canonical order through the common truncation order.
    pub fn first_mismatch(&self, other: &Character) -> Option<(WeightVector, u64, i64, i64)> {
        let order = u64::from(self.order.min(other.order));
        let mut keys: Vec<&WeightVector> = self.table.keys().chain(other.table.keys()).collect();
        keys.sort_by(|a, b| a.canonical_cmp(b));
        keys.dedup();
        for n in keys {
            let (a, b) = (self.get(n), other.get(n));
            for d in 0..=order {
                if a.coeff(d) != b.coeff(d) {
                    return Some((n.clone(), d, a.coeff(d), b.coeff(d)));
                }
            }
        }
        None
    }
}

/// `(z_1 q)^{k_0} ... (z_ℓ q)^{k_{ℓ-1}} χ(z_1 q, ..., z_ℓ q; q)`: the value at
/// weight `n` is `q^{total(n)} ch(n - (k_0, ..., k_{ℓ-1}))`.
///
/// `ch` is expected to be the character of `cyclic_shift(k)`; the result is
/// labelled with `k`.
pub fn shift_substitute(ch: &Character, k: &LevelComposition) -> Result<Character> {
    if ch.rank() != k.rank() {
        return Err(Error::RankMismatch {
            expected: k.rank(),
            got: ch.rank(),
        });
    }
    let mut out = Character::new(k.clone(), ch.order);
    for (src, poly) in &ch.table {
        let n = src.plus(k.leading_parts());
        let total = n.total() as u64;
        if total > u64::from(ch.order) {
            continue;
        }
        out.set(n, poly.shift_up(total))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64], m: u32) -> QPolynomial {
        QPolynomial::from_coeffs(c.to_vec(), m)
    }

    fn comp(parts: &[u32]) -> LevelComposition {
        LevelComposition::new(parts.to_vec()).unwrap()
    }

    fn w(c: &[i64]) -> WeightVector {
        WeightVector::new(c.to_vec())
    }

    #[test]
    fn arithmetic_examples() {
        let a = poly(&[3, 0, -1, 4], 3);
        assert_eq!(a.add(&QPolynomial::zero(3)).unwrap(), a);
        assert_eq!(
            poly(&[1, 1], 2).mul(&poly(&[1, -1], 2)).unwrap(),
            poly(&[1, 0, -1], 2)
        );
        assert_eq!(
            poly(&[0, 1, 1], 2).mul(&poly(&[0, 1], 2)).unwrap(),
            poly(&[0, 0, 1], 2)
        );
        assert_eq!(a.sub(&a).unwrap(), QPolynomial::zero(3));
    }

    #[test]
    fn orders_combine_by_minimum() {
        let a = poly(&[1, 2, 3, 4], 3);
        let b = poly(&[1, 1], 1);
        assert_eq!(a.add(&b).unwrap(), poly(&[2, 3], 1));
        assert_eq!(a.mul(&b).unwrap().order(), 1);
    }

    #[test]
    fn overflow_is_an_error() {
        let big = poly(&[i64::MAX], 0);
        assert_eq!(big.add(&QPolynomial::one(0)), Err(Error::Overflow));
        assert_eq!(big.mul(&poly(&[2], 0)), Err(Error::Overflow));
        assert_eq!(
            poly(&[i64::MIN], 0).sub(&QPolynomial::one(0)),
            Err(Error::Overflow)
        );
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(geometric_factor(1, 3).unwrap(), poly(&[0, 1, 1, 1], 3));
        assert_eq!(geometric_factor(3, 5).unwrap(), poly(&[0, 0, 0, 1], 5));
        assert_eq!(
            geometric_factor(2, 6).unwrap(),
            poly(&[0, 0, 1, 0, 1, 0, 1], 6)
        );
        assert_eq!(geometric_factor(0, 6), Err(Error::ZeroExponent));
    }

    #[test]
    fn qpoly_json_shape() {
        let p = poly(&[1, 0, 2], 2);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"M":2,"coeffs":[1,0,2]}"#
        );
    }

    #[test]
    fn shift_substitute_examples() {
        // ℓ = 1, K = (1, 0): shifted composition is (0, 1)
        let mut ch = Character::new(comp(&[0, 1]), 5);
        ch.set(w(&[0]), QPolynomial::one(5)).unwrap();
        let out = shift_substitute(&ch, &comp(&[1, 0])).unwrap();
        assert_eq!(out.get(&w(&[1])), poly(&[0, 1], 5));
        assert!(out.get(&w(&[0])).is_zero());

        // K = (0, 0, k): no index shift, only the q^{total} factor
        let mut ch = Character::new(comp(&[2, 0, 0]), 6);
        ch.set(w(&[0, 0]), QPolynomial::one(6)).unwrap();
        ch.set(w(&[1, 1]), poly(&[0, 0, 3], 6)).unwrap();
        let out = shift_substitute(&ch, &comp(&[0, 0, 2])).unwrap();
        assert_eq!(out.get(&w(&[0, 0])), QPolynomial::one(6));
        assert_eq!(out.get(&w(&[1, 1])), poly(&[0, 0, 0, 0, 3], 6));

        assert!(matches!(
            shift_substitute(&ch, &comp(&[1, 0])),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn character_json_is_canonical() {
        let mut ch = Character::new(comp(&[1, 1, 0]), 2);
        ch.set(w(&[1, 0]), poly(&[0, 1], 2)).unwrap();
        ch.set(w(&[0, 1]), poly(&[0, 1, 1], 2)).unwrap();
        ch.set(w(&[0, 0]), QPolynomial::one(2)).unwrap();
        ch.set(w(&[2, 0]), QPolynomial::zero(2)).unwrap();
        let s = serde_json::to_string(&ch).unwrap();
        assert_eq!(
            s,
            r#"{"K":[1,1,0],"M":2,"table":[{"n":[0,0],"poly":{"M":2,"coeffs":[1,0,0]}},{"n":[0,1],"poly":{"M":2,"coeffs":[0,1,1]}},{"n":[1,0],"poly":{"M":2,"coeffs":[0,1,0]}}]}"#
        );
        let back: Character = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn mismatch_reports_first_difference() {
        let mut a = Character::new(comp(&[1, 0]), 3);
        a.set(w(&[1]), poly(&[0, 1, 1, 1], 3)).unwrap();
        let mut b = a.clone();
        b.bump(w(&[1]), 2, 1).unwrap();
        assert_eq!(a.first_mismatch(&b), Some((w(&[1]), 2, 1, 2)));
        assert_eq!(a.first_mismatch(&a), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn geometric_factor_inverts_one_minus_qn(n in 1u64..12, m in 0u32..40) {
                let one_minus = QPolynomial::one(m).sub(&QPolynomial::monomial(n, 1, m)).unwrap();
                let prod = one_minus.mul(&geometric_factor(n, m).unwrap()).unwrap();
                prop_assert_eq!(prod, QPolynomial::monomial(n, 1, m));
            }

            #[test]
            fn shift_substitute_raises_valuation(
                entries in proptest::collection::vec((0i64..3, 0i64..3, proptest::collection::vec(-3i64..4, 8)), 0..6),
                parts in (0u32..3, 0u32..3, 0u32..3),
            ) {
                let k = comp(&[parts.0, parts.1, parts.2]);
                let mut ch = Character::new(crate::index_sets::cyclic_shift(&k), 7);
                for (a, b, c) in entries {
                    ch.set(w(&[a, b]), poly(&c, 7)).unwrap();
                }
                let out = shift_substitute(&ch, &k).unwrap();
                for (n, p) in out.entries() {
                    prop_assert!(p.valuation().unwrap() >= n.total() as u64);
                }
            }
        }
    }
}
