//! Hub-weighted sparse regression.
//!
//! An unsupervised edge-out fit of `X ≈ XB` finds hub features, whose
//! absolute row sums become penalty factors for a weighted lasso or elastic
//! net. The crate also ships the synthetic generators and the benchmark
//! harness used to compare the method against plain lasso, elastic net and
//! the univariate adaptive lasso.

pub mod cli;
pub mod edgeout;
pub mod error;
pub mod harness;
pub mod numcore;
pub mod par;
pub mod penreg;
pub mod simgen;
mod serde_inf;

pub use error::{Error, Result};
