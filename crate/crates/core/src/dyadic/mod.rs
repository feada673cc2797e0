//! Dyadic arithmetic, Walsh characters and transforms, and the dyadic
//! martingale on a finite grid.

mod grid;
mod interval;
mod martingale;
mod point;
mod step;
mod transform;

pub use grid::Grid;
pub use interval::DyadicInterval;
pub use martingale::{conditional_expectation, maximal_function, martingale_levels, Level};
pub(crate) use martingale::dyadic_means;
pub use point::{character, walsh_function, DyadicPoint};
pub use step::StepFunction;
pub use transform::{apply_multiplier, fwht, walsh_fourier};
pub(crate) use transform::character_sum;
