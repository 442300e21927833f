//! Grade-by-grade realisation of the sequence
//!
//! `0 → W_{shift K} --ω--> W --φ_0--> ⊕_{D_1} W_I --φ_1--> ... --φ_{m-1}--> W_{I_m} → 0`
//!
//! on monomial bases. Every map acts on configuration labels: `ω` prepends the
//! block `(k_0, ..., k_{ℓ-1})` and lifts all particles by one degree, and `φ_t`
//! sends `(I, cfg)` to `Σ_i ±(I ∪ {i}, cfg)`, dropping terms whose label leaves
//! the target region. Ranks are computed exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    enumerate_by_grade_capped, is_admissible, Configuration, Grade, LevelComposition, WeightVector,
    DEFAULT_OUTPUT_CAP,
};
use crate::error::{Error, Result};
use crate::index_sets::{cyclic_shift, d_family, in_region, position_sign, IndexFamily, IndexSet};
use crate::rank::{multiply, rank};

/// `(k_0, ..., k_{ℓ-1}, b_0, b_1, ...)` for a source configuration `b`
/// admissible for `cyclic_shift(k)`.
pub fn omega_image(cfg: &Configuration, k: &LevelComposition) -> Result<Configuration> {
    let shifted = cyclic_shift(k);
    if !is_admissible(cfg, &shifted) {
        return Err(Error::Precondition(format!(
            "{cfg} is not admissible for {shifted}"
        )));
    }
    let mut entries = k.leading_parts().to_vec();
    entries.extend_from_slice(cfg.entries());
    Ok(Configuration::new(entries))
}

/// Grade of the `ω`-preimage of grade `target` in `W_{shift K}`, if any.
///
/// `ω` raises the degree by the total target weight and the weight by
/// `(k_0, ..., k_{ℓ-1})`.
pub fn omega_source_grade(k: &LevelComposition, target: &Grade) -> Option<Grade> {
    let weight = target.weight.minus(k.leading_parts());
    let total = target.weight.total();
    if !weight.is_nonnegative() || total < 0 || (total as u64) > target.degree {
        return None;
    }
    Some(Grade::new(target.degree - total as u64, weight))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBasis {
    #[serde(rename = "K")]
    pub composition: LevelComposition,
    pub index_set: IndexSet,
    pub grade: Grade,
    pub vectors: Vec<Configuration>,
}

pub type Label = (IndexSet, Configuration);

/// Integer matrix with labelled rows (targets) and columns (sources).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrix {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub entries: Vec<Vec<i64>>,
}

impl SignMatrix {
    fn zeros(rows: Vec<Label>, cols: Vec<Label>) -> Self {
        let entries = vec![vec![0; cols.len()]; rows.len()];
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rank(&self) -> usize {
        rank(&self.entries, self.cols.len())
    }

    /// `self ∘ first`; `None` when the label sets do not line up.
    pub fn compose(&self, first: &SignMatrix) -> Option<Vec<Vec<i64>>> {
        if self.cols != first.rows {
            return None;
        }
        Some(multiply(
            &self.entries,
            &first.entries,
            first.rows.len(),
            first.cols.len(),
        ))
    }
}

/// Every consecutive pair composes to zero.
pub fn complex_holds(maps: &[SignMatrix]) -> bool {
    maps.windows(2).all(|pair| match pair[1].compose(&pair[0]) {
        Some(prod) => prod.iter().flatten().all(|&x| x == 0),
        None => false,
    })
}

/// Enumerated bases of `W` and `W_{shift K}` up to a degree bound.
#[derive(Debug)]
pub struct ExactnessLab {
    k: LevelComposition,
    shifted: LevelComposition,
    family: IndexFamily,
    max_degree: u64,
    by_grade: BTreeMap<Grade, Vec<Configuration>>,
    shifted_by_grade: BTreeMap<Grade, Vec<Configuration>>,
}

impl ExactnessLab {
    pub fn new(k: &LevelComposition, max_degree: u64) -> Result<Self> {
        Self::with_cap(k, max_degree, DEFAULT_OUTPUT_CAP)
    }

    pub fn with_cap(k: &LevelComposition, max_degree: u64, cap: usize) -> Result<Self> {
        let shifted = cyclic_shift(k);
        Ok(Self {
            by_grade: enumerate_by_grade_capped(k, max_degree, cap)?,
            shifted_by_grade: enumerate_by_grade_capped(&shifted, max_degree, cap)?,
            family: d_family(k),
            shifted,
            max_degree,
            k: k.clone(),
        })
    }

    pub fn m(&self) -> usize {
        self.family.m()
    }

    fn check_grade(&self, grade: &Grade) -> Result<()> {
        if grade.degree > self.max_degree {
            return Err(Error::Precondition(format!(
                "degree {} beyond enumerated bound {}",
                grade.degree, self.max_degree
            )));
        }
        if grade.weight.rank() != self.k.rank() {
            return Err(Error::RankMismatch {
                expected: self.k.rank(),
                got: grade.weight.rank(),
            });
        }
        Ok(())
    }

    pub fn basis(&self, set: &IndexSet, grade: &Grade) -> Result<GradedBasis> {
        self.check_grade(grade)?;
        set.check_valid(&self.k)?;
        let mut vectors = Vec::new();
        for cfg in self.by_grade.get(grade).into_iter().flatten() {
            if in_region(cfg, &self.k, set)? {
                vectors.push(cfg.clone());
            }
        }
        Ok(GradedBasis {
            composition: self.k.clone(),
            index_set: set.clone(),
            grade: grade.clone(),
            vectors,
        })
    }

    /// Labels of `⊕_{I ∈ D_t(K)} W_I` at `grade`.
    fn node_labels(&self, t: usize, grade: &Grade) -> Result<Vec<Label>> {
        let mut labels = Vec::new();
        for set in self.family.of_size(t) {
            for cfg in self.basis(set, grade)?.vectors {
                labels.push((set.clone(), cfg));
            }
        }
        Ok(labels)
    }

    /// Source basis of `ω` feeding `grade`.
    pub fn omega_source(&self, grade: &Grade) -> Vec<Configuration> {
        omega_source_grade(&self.k, grade)
            .and_then(|g| self.shifted_by_grade.get(&g).cloned())
            .unwrap_or_default()
    }

    pub fn omega_matrix(&self, grade: &Grade) -> Result<SignMatrix> {
        let rows = self.node_labels(0, grade)?;
        let cols: Vec<Label> = self
            .omega_source(grade)
            .into_iter()
            .map(|c| (IndexSet::empty(), c))
            .collect();
        let index: HashMap<&Configuration, usize> =
            rows.iter().enumerate().map(|(r, l)| (&l.1, r)).collect();
        let mut images = Vec::with_capacity(cols.len());
        for (_, src) in &cols {
            let img = omega_image(src, &self.k)?;
            images.push(index.get(&img).copied());
        }
        let mut mat = SignMatrix::zeros(rows, cols);
        for (c, r) in images.into_iter().enumerate() {
            if let Some(r) = r {
                mat.entries[r][c] = 1;
            }
        }
        Ok(mat)
    }

    pub fn phi_matrix(&self, t: usize, grade: &Grade) -> Result<SignMatrix> {
        let m = self.m();
        if t >= m {
            return Err(Error::StageOutOfRange { stage: t, m });
        }
        let cols = self.node_labels(t, grade)?;
        let rows = self.node_labels(t + 1, grade)?;
        let index: HashMap<&Label, usize> = rows.iter().enumerate().map(|(r, l)| (l, r)).collect();
        let singletons: Vec<usize> = self.family.top().elements().to_vec();
        let mut entries = vec![vec![0i64; cols.len()]; rows.len()];
        for (c, (set, cfg)) in cols.iter().enumerate() {
            for &i in singletons.iter().filter(|&&i| !set.contains(i)) {
                let target = set.with(i)?;
                if !in_region(cfg, &self.k, &target)? {
                    continue;
                }
                let r = index[&(target, cfg.clone())];
                entries[r][c] = position_sign(set, i)?;
            }
        }
        Ok(SignMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// `[ω, φ_0, ..., φ_{m-1}]` at one grade.
    pub fn maps(&self, grade: &Grade) -> Result<Vec<SignMatrix>> {
        let mut maps = vec![self.omega_matrix(grade)?];
        for t in 0..self.m() {
            maps.push(self.phi_matrix(t, grade)?);
        }
        Ok(maps)
    }

    /// Grades of `W` plus grades hit by `ω` images, up to the degree bound.
    pub fn grades(&self) -> Result<BTreeSet<Grade>> {
        let mut grades: BTreeSet<Grade> = self.by_grade.keys().cloned().collect();
        for cfg in self.shifted_by_grade.values().flatten() {
            let g = Grade::of(&omega_image(cfg, &self.k)?, self.k.rank());
            if g.degree <= self.max_degree {
                grades.insert(g);
            }
        }
        Ok(grades)
    }

    pub fn grade_record(&self, grade: &Grade) -> Result<GradeRecord> {
        let rank_l = self.k.rank();
        let sources = self.omega_source(grade);
        let omega = self.omega_matrix(grade)?;
        let maps = self.maps(grade)?;

        let mut dims = vec![sources.len(), omega.rows.len()];
        for t in 1..=self.m() {
            dims.push(self.node_labels(t, grade)?.len());
        }

        // ω: label-level injectivity and grade law
        let mut images = BTreeSet::new();
        let mut grade_law = true;
        for src in &sources {
            let img = omega_image(src, &self.k)?;
            grade_law &= Grade::of(&img, rank_l) == *grade;
            images.insert(img);
        }
        let labels_distinct = images.len() == sources.len();
        let omega_rank = omega.rank();
        let omega_injective = labels_distinct && omega_rank == sources.len();

        let leading = self.k.leading_parts();
        let kernel_labels: BTreeSet<Configuration> = omega
            .rows
            .iter()
            .map(|(_, c)| c)
            .filter(|c| c.first_block(rank_l) == leading)
            .cloned()
            .collect();
        let image_matches_first_block = images == kernel_labels;

        let phi_ranks: Vec<usize> = maps[1..].iter().map(SignMatrix::rank).collect();
        let complex = complex_holds(&maps);

        // exactness at W, at each middle node, and surjectivity of the last map
        let mut exact_at = Vec::with_capacity(self.m() + 1);
        let mut incoming = omega_rank;
        for (t, &dim) in dims[1..].iter().enumerate() {
            let outgoing = phi_ranks.get(t).copied().unwrap_or(0);
            exact_at.push(dim - outgoing == incoming);
            incoming = outgoing;
        }
        let surjective = match phi_ranks.last() {
            Some(&r) => r == *dims.last().expect("at least two nodes"),
            None => omega_rank == dims[1],
        };
        let euler_sum: i64 = dims
            .iter()
            .enumerate()
            .map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();

        let pass = omega_injective
            && grade_law
            && image_matches_first_block
            && complex
            && exact_at.iter().all(|&e| e)
            && surjective
            && euler_sum == 0;
        Ok(GradeRecord {
            degree: grade.degree,
            weight: grade.weight.clone(),
            dims,
            omega_rank,
            phi_ranks,
            omega_injective,
            omega_grade_law: grade_law,
            omega_image_is_first_block_span: image_matches_first_block,
            complex,
            exact_at,
            surjective,
            euler_sum,
            pass,
        })
    }

    pub fn report(&self) -> Result<ExactnessReport> {
        let grades = self
            .grades()?
            .iter()
            .map(|g| self.grade_record(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactnessReport {
            composition: self.k.clone(),
            shifted: self.shifted.clone(),
            max_degree: self.max_degree,
            m: self.m(),
            all_pass: grades.iter().all(|g| g.pass),
            grades,
        })
    }
}

/// Node dimensions are listed source first: `W_{shift K}`, `W`, then
/// `⊕_{D_t}` for `t = 1..=m`. `exact_at[t]` is exactness at the node
/// `⊕_{D_t}` (`t = 0` is `W`); `surjective` concerns the last map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub degree: u64,
    pub weight: WeightVector,
    pub dims: Vec<usize>,
    pub omega_rank: usize,
    pub phi_ranks: Vec<usize>,
    pub omega_injective: bool,
    pub omega_grade_law: bool,
    pub omega_image_is_first_block_span: bool,
    pub complex: bool,
    pub exact_at: Vec<bool>,
    pub surjective: bool,
    pub euler_sum: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    #[serde(rename = "K")]
    pub composition: LevelComposition,
    pub shifted: LevelComposition,
    pub max_degree: u64,
    pub m: usize,
    pub all_pass: bool,
    pub grades: Vec<GradeRecord>,
}

impl ExactnessReport {
    pub const CSV_HEADER: &'static str = "K,degree,weight,dims,omega_rank,phi_ranks,euler_sum,pass";

    /// One CSV row per grade; list-valued fields are `;`-separated.
    pub fn csv_rows(&self) -> Vec<String> {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
        }
        self.grades
            .iter()
            .map(|g| {
                let mut row = String::new();
                let _ = write!(
                    row,
                    "{},{},{},{},{},{},{},{}",
                    join(self.composition.parts()),
                    g.degree,
                    join(g.weight.components()),
                    join(&g.dims),
                    g.omega_rank,
                    join(&g.phi_ranks),
                    g.euler_sum,
                    g.pass
                );
                row
            })
            .collect()
    }
}

pub fn build_graded_basis(
    k: &LevelComposition,
    set: &IndexSet,
    grade: &Grade,
) -> Result<GradedBasis> {
    ExactnessLab::new(k, grade.degree)?.basis(set, grade)
}

pub fn build_phi_matrix(k: &LevelComposition, t: usize, grade: &Grade) -> Result<SignMatrix> {
    ExactnessLab::new(k, grade.degree)?.phi_matrix(t, grade)
}

/// Consecutive maps compose to zero at `grade`, including `φ_0 ∘ ω`.
pub fn verify_complex(k: &LevelComposition, grade: &Grade) -> Result<bool> {
    Ok(complex_holds(
        &ExactnessLab::new(k, grade.degree)?.maps(grade)?,
    ))
}

pub fn verify_exactness(k: &LevelComposition, max_degree: u64) -> Result<ExactnessReport> {
    ExactnessLab::new(k, max_degree)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[u32]) -> LevelComposition {
        LevelComposition::new(parts.to_vec()).unwrap()
    }

    fn cfg(e: &[u32]) -> Configuration {
        Configuration::new(e.to_vec())
    }

    fn set(e: &[usize]) -> IndexSet {
        IndexSet::new(e.to_vec()).unwrap()
    }

    fn grade(d: u64, w: &[i64]) -> Grade {
        Grade::new(d, WeightVector::new(w.to_vec()))
    }

    #[test]
    fn omega_examples() {
        assert_eq!(
            omega_image(&Configuration::empty(), &comp(&[0, 0, 2])).unwrap(),
            Configuration::empty()
        );
        let img = omega_image(&cfg(&[0, 1]), &comp(&[1, 0])).unwrap();
        assert_eq!(img, cfg(&[1, 0, 1]));
        assert!(is_admissible(&img, &comp(&[1, 0])));
        let img = omega_image(&Configuration::empty(), &comp(&[1, 1, 0])).unwrap();
        assert_eq!(img, cfg(&[1, 1]));
        assert_eq!(Grade::of(&img, 2), grade(2, &[1, 1]));
        assert!(matches!(
            omega_image(&cfg(&[1]), &comp(&[1, 0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn omega_grade_law_holds() {
        for k in LevelComposition::all(2, 3).unwrap() {
            let shifted = cyclic_shift(&k);
            for src in crate::combinatorics::enumerate_admissible(&shifted, 7).unwrap() {
                let img = omega_image(&src, &k).unwrap();
                assert!(is_admissible(&img, &k));
                let (gs, gi) = (Grade::of(&src, 2), Grade::of(&img, 2));
                let lead: u64 = k.leading_parts().iter().map(|&x| u64::from(x)).sum();
                assert_eq!(gi.degree, gs.degree + gs.weight.total() as u64 + lead);
                assert_eq!(gi.weight, gs.weight.plus(k.leading_parts()));
                assert_eq!(omega_source_grade(&k, &gi), Some(gs));
            }
        }
    }

    #[test]
    fn graded_basis_examples() {
        let k = comp(&[2, 0, 0]);
        assert!(build_graded_basis(&k, &set(&[0]), &grade(2, &[2, 0]))
            .unwrap()
            .vectors
            .is_empty());
        assert_eq!(
            build_graded_basis(&k, &IndexSet::empty(), &grade(2, &[2, 0]))
                .unwrap()
                .vectors,
            vec![cfg(&[2])]
        );
        let full = crate::combinatorics::enumerate_by_grade(&k, 4).unwrap();
        let g = grade(4, &[1, 1]);
        assert_eq!(
            build_graded_basis(&k, &IndexSet::empty(), &g)
                .unwrap()
                .vectors,
            full[&g]
        );
    }

    #[test]
    fn phi_stage_bounds() {
        let g = grade(2, &[1, 1]);
        assert_eq!(
            build_phi_matrix(&comp(&[0, 0, 2]), 0, &g),
            Err(Error::StageOutOfRange { stage: 0, m: 0 })
        );
        assert!(build_phi_matrix(&comp(&[2, 0, 0]), 1, &g).is_err());
    }

    #[test]
    fn phi_zero_signs() {
        let k = comp(&[2, 0, 0]);
        let g = grade(3, &[2, 0]);
        let phi = build_phi_matrix(&k, 0, &g).unwrap();
        // sources: every admissible cfg; +1 exactly where the cfg lies in region {0}
        for (c, (_, src)) in phi.cols.iter().enumerate() {
            let col: Vec<i64> = phi.entries.iter().map(|r| r[c]).collect();
            let inside = in_region(src, &k, &set(&[0])).unwrap();
            assert_eq!(col.iter().filter(|&&x| x == 1).count(), usize::from(inside));
            assert!(col.iter().all(|&x| x == 0 || x == 1));
        }
    }

    #[test]
    fn phi_one_signs() {
        let k = comp(&[1, 1, 0]);
        let g = grade(4, &[1, 1]);
        let phi = build_phi_matrix(&k, 1, &g).unwrap();
        for (r, (tgt, cfg_r)) in phi.rows.iter().enumerate() {
            assert_eq!(tgt, &set(&[0, 1]));
            for (c, (src, cfg_c)) in phi.cols.iter().enumerate() {
                let want = if cfg_r != cfg_c {
                    0
                } else if src == &set(&[0]) {
                    -1
                } else {
                    1
                };
                assert_eq!(phi.entries[r][c], want);
            }
        }
    }

    #[test]
    fn complex_examples() {
        let k = comp(&[1, 1, 0]);
        let lab = ExactnessLab::new(&k, 6).unwrap();
        for g in lab.grades().unwrap() {
            assert!(complex_holds(&lab.maps(&g).unwrap()), "{g:?}");
        }
        assert!(verify_complex(&comp(&[2, 0, 0]), &grade(3, &[1, 1])).unwrap());
    }

    #[test]
    fn sign_flip_breaks_complex() {
        let k = comp(&[1, 1, 0]);
        let lab = ExactnessLab::new(&k, 6).unwrap();
        let g = grade(4, &[1, 1]);
        let mut maps = lab.maps(&g).unwrap();
        assert!(complex_holds(&maps));
        let phi1 = &mut maps[2];
        let (r, c) = phi1
            .entries
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.iter().position(|&x| x == -1).map(|c| (r, c)))
            .expect("a -1 entry");
        phi1.entries[r][c] = 1;
        assert!(!complex_holds(&maps));
    }

    #[test]
    fn short_sequence_is_bijection() {
        let report = verify_exactness(&comp(&[0, 0, 2]), 7).unwrap();
        assert!(report.all_pass);
        assert_eq!(report.m, 0);
        for g in &report.grades {
            assert_eq!(g.dims.len(), 2);
            assert_eq!(g.dims[0], g.dims[1]);
            assert!(g.phi_ranks.is_empty());
        }
    }

    #[test]
    fn exactness_small() {
        for k in LevelComposition::all(2, 2).unwrap() {
            let report = verify_exactness(&k, 6).unwrap();
            assert!(report.all_pass, "{k}");
        }
    }

    #[test]
    fn csv_rows_have_header_arity() {
        let report = verify_exactness(&comp(&[1, 1, 0]), 3).unwrap();
        let cols = ExactnessReport::CSV_HEADER.split(',').count();
        for row in report.csv_rows() {
            assert_eq!(row.split(',').count(), cols);
        }
    }
}
