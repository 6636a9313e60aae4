//! Spreads, rotational spreads and oriented parallelisms of real projective
//! 3-space, with numeric verification suites.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clifford;
pub mod error;
pub mod parallelisms;
pub mod projective;
pub mod report;
pub mod sampling;
pub mod solve;
pub mod spreads;
pub mod verify;

pub use error::{Error, Result};
