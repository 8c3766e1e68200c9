//! Periodic 2D immersed-boundary toolkit.

// `!(x > 0.0)` checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coupling;
pub mod error;
pub mod kernels;
pub mod macgrid;
pub mod simulation;
pub mod structure;

pub use error::{Error, Result};
pub use structure::Vec2;
