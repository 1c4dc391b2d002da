//! Computational toolkit for counting Gaussian primes p = a² + b² with the
//! coordinate b restricted to a sparse set B, together with the arithmetic
//! and analytic machinery needed to predict and cross-check those counts:
//! exact ℤ[i] arithmetic, residue densities, character groups over ℤ[i] and
//! ℤ, smooth bumps with transform-decay checks, large-sieve ratios, bilinear
//! correlation identities, and high-throughput counting kernels.
//!
//! All counting kernels are deterministic: parallel work is partitioned over
//! b-strata and merged in a fixed order, so results are independent of the
//! worker count.

pub mod analysis;
pub mod arith;
pub mod bilinear;
pub mod budget;
pub mod chars;
pub mod density;
pub mod error;
pub mod gauss;
pub mod main_term;
pub mod rational_chars;
pub mod sieve;

pub use error::{Error, Result};
pub use gauss::GaussInt;
