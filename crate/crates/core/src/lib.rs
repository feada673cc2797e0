//! Walsh-model time–frequency analysis on finite dyadic grids.
//!
//! The crate is organized bottom-up:
//!
//! - [`dyadic`]: digit arithmetic, Walsh characters, the fast Walsh–Fourier
//!   transform, conditional expectations and maximal functions.
//! - [`tiles`]: tiles, bitiles, wave packets, trees and forests.
//! - [`variation`]: jump counts, `V^r` norms, Haar square functions.
//! - [`size`]: the size functional, forest selection and splitting, and
//!   exceptional sets.
//! - [`multiplier`]: band multipliers, covering chains, and estimators for the
//!   `M₂*` norm of a multiplier family.
//! - [`carleson`]: the operators `W` and `W^max` and the pointwise tree bound.

pub mod carleson;
pub mod dyadic;
pub mod error;
pub mod multiplier;
pub mod rng;
pub mod size;
pub mod tiles;
pub mod variation;

pub use error::{Error, Result};
