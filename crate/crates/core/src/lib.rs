//! Coherifications of classical states and stochastic actions that remain
//! perfectly distinguishable.

// `!(x < tol)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod channels;
pub mod config;
pub mod error;
pub mod json;
pub mod linalg;
pub mod quantum;
pub mod random;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
