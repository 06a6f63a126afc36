//! Classical simulator and verification harness for a quantum streaming
//! Max-DiCut sketch.
//!
//! The crate is organized around the pipeline that the simulator reproduces:
//!
//! - [`graph`]: directed edge streams, degree/bias bookkeeping, generators,
//!   and a brute-force Max-DiCut oracle for small instances.
//! - [`classes`]: bias classes, exact first-order snapshots, and the
//!   oblivious rounding value `r† Σ (1 - r)`.
//! - [`pseudo`]: the geometric degree grid, seeded hash oracles, pseudobiases,
//!   and the exact pseudosnapshot oracle used as ground truth.
//! - [`sim`]: an exact classical simulation of the quantum sketch: the
//!   uniform superposition as per-vertex interval sets, projective
//!   measurement sampling, and the single-copy estimator.
//! - [`estimator`]: parallel repetition, averaging over degree-class pairs,
//!   and the median-of-repetitions Max-DiCut estimate.
//! - [`comm`]: the one-way communication demo (labeled vertices vs. a
//!   directed matching) with a classical sampling baseline.

pub mod checks;
pub mod classes;
pub mod cli;
pub mod comm;
pub mod corpus;
pub mod estimator;
pub mod exact;
pub mod graph;
pub mod pseudo;
pub mod seeds;
pub mod sim;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum QdError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QdError>;
