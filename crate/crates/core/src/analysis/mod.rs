//! Operation counting, error measurement against exact division, and the
//! numeric claims suite.

pub mod claims;
pub mod compare;
pub mod counter;
pub mod report;
pub mod scenes;
