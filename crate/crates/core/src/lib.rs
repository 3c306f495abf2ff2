//! Low approximate regret learning dynamics for smooth repeated games.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod engine;
pub mod error;
pub mod games;
pub mod learners;
pub mod metrics;
pub mod simplex;

pub use error::{Error, Result};
