//! Perspective-correct rasterization kernels with operation counting.

// `!(x > 0.0)` rejects NaN as well; the counter's arithmetic impls bump tallies
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::suspicious_arithmetic_impl, clippy::too_many_arguments)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod image;
pub mod raster;
pub mod shade;
pub mod texmap;

pub use analysis::counter::{Counted, OpCounter, Real, counted_scope};
pub use error::{Error, Result};
