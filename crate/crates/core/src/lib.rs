//! Optimal regulators for fractional-order oscillators.

pub mod error;
pub mod fracsol;
pub mod lift;
pub mod linalg;
pub mod modal;
pub mod order;
pub mod quad;
pub mod riccati;
pub mod special;
pub mod synth;
pub mod response;
pub mod cli;
