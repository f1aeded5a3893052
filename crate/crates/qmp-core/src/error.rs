//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("vector partition problem is not pointed: no strictly positive functional on the columns")]
    NotPointed,

    #[error("negative multiplicity {value} at {at}: the supplied weight function is not a representation")]
    NegativeMultiplicity { value: String, at: String },

    #[error("oracle bound exceeded: k = {k} > {max}")]
    OracleBound { k: usize, max: usize },

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope is empty")]
    Empty,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("quasi-polynomial fit failed for periods {periods:?}")]
    FitFailed { periods: Vec<usize> },

    #[error("interpolation failed: {0}")]
    Interpolation(String),

    #[error("unsupported wall: {0}")]
    UnsupportedWall(String),

    #[error("degenerate moment polytope: {0}")]
    Degenerate(String),

    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("did not converge after {steps} steps (last norm^2 {last})")]
    NonConvergence { steps: usize, last: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
