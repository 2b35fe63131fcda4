//! Exact Hermite normal forms of integer matrices, closed-form natural
//! densities of their diagonal patterns, and seeded Monte Carlo experiments
//! that check those densities empirically.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: arbitrary-precision integer matrices, determinants, minors.
//! * [`sample`]: deterministic sampling in translated cubes, random unimodular maps.
//! * [`hnf`]: row-style Hermite normal form with a unimodular witness.
//! * [`zeta`] and [`density`]: zeta values and the diagonal-pattern densities.
//! * [`arith`]: factorization, exact arithmetic functions and the gcd-of-determinants law.
//! * [`montecarlo`]: empirical estimators for all of the above.

pub mod arith;
pub mod density;
mod error;
pub mod hnf;
pub mod matrix;
pub mod montecarlo;
pub mod sample;
pub mod zeta;

pub use error::{Error, Result};
pub use hnf::{diag_of_hnf, hnf, is_hnf, DiagPattern, HnfResult};
pub use matrix::{determinant, minors_gcd, IntMatrix};
pub use sample::{random_unimodular, sample_matrix, SampleConfig};
