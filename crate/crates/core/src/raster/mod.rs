//! Pixel coverage and the non-axis-aligned traversal schemes.

pub mod scanline;
pub mod constz;
pub mod nrl;
pub mod serpentine;
pub mod aniso;
