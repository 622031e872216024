//! Retrodictive single- and multi-qubit state tomography for measurements
//! disturbed by random phase errors whose values are revealed after the fact.
//!
//! Each revealed phase θ turns the nominal equatorial projector P(φ) into the
//! effective operator P(φ+θ). Records of such operators, kept sparse or
//! coarse-grained into angular bins, are reconstructed by
//!
//! * sequential Monte Carlo over a particle posterior ([`bayes`]),
//! * maximum likelihood over a Cholesky parametrization ([`ml::cholesky_ml_fit`]),
//! * projected gradient descent with backtracking ([`ml::pgdb_fit`]).
//!
//! The [`harness`] module runs seeded Monte Carlo benchmarks over random
//! full-rank states.

pub mod bayes;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod measurement;
pub mod ml;

pub use error::{Result, TomographyError};
pub use linalg::{fidelity, infidelity, DensityMatrix, Projector};
pub use measurement::{MeasurementRecord, PhaseDistribution};
