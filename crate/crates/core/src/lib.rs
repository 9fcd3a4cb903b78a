//! Symplectic basic normal forms, Maslov-type index iteration, and
//! independent numerical oracles for the index of iterated symplectic paths.
//!
//! The crate is organized around three layers:
//!
//! * exact data: [`exact::SurdSum`] (rationals extended by square roots) and
//!   [`angle::Angle`] make floor/fractional-part evaluations of `m·θ/2π`
//!   exact, so index formulas never silently round across a floor boundary;
//! * closed-form iteration: [`forms`] builds normal-form matrices and
//!   [`index`] evaluates the iteration formulas for `i(γ,m)`, `ν(γ,m)` and
//!   the mean index;
//! * verification: [`decompose`] recovers normal-form invariants from a
//!   numeric symplectic matrix, [`oracle`] recomputes nullities from kernel
//!   dimensions and indices from crossing counts along generated paths, and
//!   [`r8`] runs the exhaustive 8-dimensional configuration scans.

pub mod angle;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod forms;
pub mod index;
pub mod oracle;
pub mod r8;
pub mod report;
pub mod seedgen;

pub use angle::Angle;
pub use error::SympathError;
pub use exact::SurdSum;
pub use forms::{BasicBlock, HyperbolicTail, IndexSeed, NormalFormCounts, SymplecticMatrix};
pub use index::{CharacteristicRecord, IterationResult};
