//! Online secretary matching: random-order arrival algorithms for weighted
//! matching under vertex, edge and hypergraph arrival, the ordinal analysis
//! behind the 5/12 ceiling, and an experiment harness.

pub mod arrival;
pub mod bench;
mod blossom;
pub mod edge;
pub mod error;
pub mod graph;
pub mod hyper;
pub mod ordinal;
pub mod stats;
pub mod verify;
pub mod vertex;

pub use error::{Error, Result};
