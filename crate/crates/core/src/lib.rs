//! Characters of Feigin–Stoyanovsky type subspaces of standard modules for
//! affine `sl(ℓ+1)`, computed from their combinatorial bases of
//! `(k, ℓ+1)`-admissible configurations.
//!
//! - [`combinatorics`]: configurations, admissibility, enumeration
//! - [`index_sets`]: the family `D(K)` and the regions `B_I`
//! - [`qseries`]: truncated `q`-series and multivariate characters
//! - [`recurrence`]: enumeration characters, the recurrence system and the
//!   coefficient solver
//! - [`exactness`]: the exact sequences realised as integer matrices
//! - [`lemmas`]: property checks on the region family
//! - [`cli`]: the command-line front end and its result cache

pub mod cache;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod exactness;
pub mod index_sets;
pub mod lemmas;
pub mod qseries;
pub mod rank;
pub mod recurrence;

pub use combinatorics::{Configuration, Grade, LevelComposition, WeightVector};
pub use error::{Error, Result};
pub use index_sets::{IndexFamily, IndexSet};
pub use qseries::{Character, QPolynomial};
