//! Symmetry-exploiting branch-and-bound for binary quadratic problems with
//! a cardinality constraint, with lifted doubly nonnegative bounds.

pub mod bb;
pub mod cli;
pub mod dnn;
pub mod error;
pub mod estimator;
pub mod instance;
pub mod matrix;
pub mod subproblem;
pub mod symmetry;

pub use error::{Error, Result};
