//! Exact and numerical tools for the quantum marginal problem.

pub mod error;
pub mod dh;
pub mod exact;
pub mod flow;
pub mod coords;
pub mod counting;
pub mod lattice;
pub mod lp;
pub mod moment_polytope;
pub mod multiplicities;
pub mod poly;
pub mod polytope;
pub mod stabilizer;

pub use error::{Error, Result};
