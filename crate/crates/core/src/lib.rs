//! Numerical verification of majorization inequalities for sums of products
//! of commuting positive semidefinite pairs.
//!
//! For positive semidefinite `A_k`, `B_k` with `A_k B_k = B_k A_k`, every
//! unitarily invariant norm satisfies
//!
//! ```text
//! |||Σ A_k B_k||| ≤ |||(Σ A_k)(Σ B_k)|||
//! ```
//!
//! which is equivalent to weak majorization of the singular values. This crate
//! replays each step of that argument numerically:
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian eigensolver,
//!   one-sided Jacobi singular values and spectral functions.
//! - [`majorization`]: weak, strong and weak-log majorization reports with
//!   per-prefix margins, plus Ky Fan and Schatten norms.
//! - [`constructions`]: the pinching family, simultaneous diagonalization of a
//!   commuting pair and the block assembly `S`, `L`, `M` of a pair instance.
//! - [`checkers`]: one checker per inequality in the chain.
//! - [`generators`]: seeded instance generators and a fixed edge-case suite.
//! - [`harness`]: instance files, trial records and the `check` / `fuzz` /
//!   `scan-bourin` commands behind the `majorant` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run --release --example theorem_chain
//! ```

pub mod checkers;
pub mod constructions;
pub mod error;
pub mod generators;
pub mod harness;
pub mod linalg;
pub mod majorization;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SortedSpectrum, SpectralDecomposition, SpectralFunction, C64};
pub use majorization::{MajorizationReport, Mode, Verdict};

/// Acceptance tolerance used by the checkers and the CLI unless overridden.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Largest matrix dimension the library accepts for instances.
pub const MAX_DIM: usize = 64;

/// Largest number of pairs in a commuting instance.
pub const MAX_PAIRS: usize = 16;
