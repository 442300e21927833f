//! Property suite for the region family `B_A`, `A ∈ D(K)`, checked over every
//! configuration satisfying the difference conditions up to a degree bound.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    for_each_admissible, Configuration, LevelComposition, DEFAULT_OUTPUT_CAP,
};
use crate::error::Result;
use crate::index_sets::{
    d_family, in_region, in_region_via_composition, in_sharp_region, in_sharp_region_by_definition,
};
use crate::recurrence::block_cancellation_violations;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTally {
    pub checks: u64,
    pub violations: u64,
    /// First offending `(K, configuration)`, if any.
    pub witness: Option<(LevelComposition, Configuration)>,
}

impl LemmaTally {
    fn record(&mut self, ok: bool, k: &LevelComposition, cfg: &Configuration) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some((k.clone(), cfg.clone()));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub ell: usize,
    pub k: u32,
    pub max_degree: u64,
    pub configurations: u64,
    pub all_pass: bool,
    /// `A ⊆ B ⇒ B_B ⊆ B_A`.
    pub monotonicity: LemmaTally,
    /// `B_{B1} ∩ B_{B2} = B_{B1 ∪ B2}`.
    pub intersection: LemmaTally,
    /// Sharp region by partial-sum equalities equals `B_B` minus all larger regions.
    pub sharp_region: LemmaTally,
    /// Each configuration in `B_A` lies in exactly one `B^B`, `B ⊇ A`.
    pub disjoint_cover: LemmaTally,
    /// Inequality system for `B_A` agrees with admissibility for `K_A`.
    pub derived_composition: LemmaTally,
    /// Per-composition count of first blocks with wrong multiplicity.
    pub block_cancellation: LemmaTally,
}

pub fn run_lemma_suite(rank: usize, level: u32, max_degree: u64) -> Result<LemmaReport> {
    run_lemma_suite_capped(rank, level, max_degree, DEFAULT_OUTPUT_CAP)
}

pub fn run_lemma_suite_capped(
    rank: usize,
    level: u32,
    max_degree: u64,
    cap: usize,
) -> Result<LemmaReport> {
    // admissibility for (k, 0, ..., 0) is exactly the difference conditions
    let vacuum = LevelComposition::vacuum(rank, level)?;
    let mut configs = Vec::new();
    for_each_admissible(&vacuum, max_degree, cap, |e| {
        configs.push(Configuration::new(e.to_vec()))
    })?;

    let mut monotonicity = LemmaTally::default();
    let mut intersection = LemmaTally::default();
    let mut sharp_region = LemmaTally::default();
    let mut disjoint_cover = LemmaTally::default();
    let mut derived_composition = LemmaTally::default();
    let mut block_cancellation = LemmaTally::default();

    for k in LevelComposition::all(rank, level)? {
        let family: Vec<_> = d_family(&k).iter().cloned().collect();
        block_cancellation.record(
            block_cancellation_violations(&k)?.is_empty(),
            &k,
            &Configuration::empty(),
        );
        for cfg in &configs {
            let member = family
                .iter()
                .map(|a| in_region(cfg, &k, a))
                .collect::<Result<Vec<_>>>()?;
            let sharp = family
                .iter()
                .map(|b| in_sharp_region(cfg, &k, b))
                .collect::<Result<Vec<_>>>()?;
            for (ia, a) in family.iter().enumerate() {
                derived_composition.record(
                    member[ia] == in_region_via_composition(cfg, &k, a)?,
                    &k,
                    cfg,
                );
                sharp_region.record(
                    sharp[ia] == in_sharp_region_by_definition(cfg, &k, a)?,
                    &k,
                    cfg,
                );
                if member[ia] {
                    let covering = family
                        .iter()
                        .enumerate()
                        .filter(|(ib, b)| a.is_subset(b) && sharp[*ib])
                        .count();
                    disjoint_cover.record(covering == 1, &k, cfg);
                }
                for (ib, b) in family.iter().enumerate() {
                    if a.is_subset(b) {
                        monotonicity.record(!member[ib] || member[ia], &k, cfg);
                    }
                    let union = a.union(b);
                    let iu = family
                        .iter()
                        .position(|s| *s == union)
                        .expect("D(K) is union-closed");
                    intersection.record((member[ia] && member[ib]) == member[iu], &k, cfg);
                }
            }
        }
    }

    let tallies = [
        &monotonicity,
        &intersection,
        &sharp_region,
        &disjoint_cover,
        &derived_composition,
        &block_cancellation,
    ];
    Ok(LemmaReport {
        ell: rank,
        k: level,
        max_degree,
        configurations: configs.len() as u64,
        all_pass: tallies.iter().all(|t| t.violations == 0),
        monotonicity,
        intersection,
        sharp_region,
        disjoint_cover,
        derived_composition,
        block_cancellation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_small() {
        let r = run_lemma_suite(2, 2, 5).unwrap();
        assert!(r.all_pass, "{r:?}");
        assert!(r.monotonicity.checks > 0);
        assert!(r.disjoint_cover.checks > 0);
        assert_eq!(r.block_cancellation.checks, 6);
    }

    #[test]
    fn level_zero_is_trivial() {
        let r = run_lemma_suite(3, 0, 4).unwrap();
        assert_eq!(r.configurations, 1);
        assert!(r.all_pass);
    }
}
