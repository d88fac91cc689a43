//! Separated-set entropy, symbolic analysis and envelope constructions for
//! small compact dynamical systems.

// NaN parameters are rejected by the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod envelope;
pub mod error;
pub mod slovak;
pub mod space;
pub mod symbolic;
pub mod systems;

pub use error::{Error, Result};
