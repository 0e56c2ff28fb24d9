//! Exact computations on finite unitary spaces over GF(q²).

// dense matrix loops read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod counts;
pub mod error;
pub mod field;
pub mod garland;
pub mod graph;
pub mod hermitian;
pub mod homology;
pub mod linalg;
pub mod poset;
pub mod registry;
pub mod spectrum;

pub use error::{Error, Result};
