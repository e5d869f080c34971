#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractional;
pub mod harness;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod stochastic;

pub use error::{FracError, Result};
