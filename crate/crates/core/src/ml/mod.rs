//! Maximum-likelihood reconstruction: the shared negative log-likelihood
//! kernel, a Cholesky-parametrized least-squares fit, and projected gradient
//! descent with Armijo backtracking.

mod cholesky;
mod cost;
mod lsq;
mod pgdb;

pub use cholesky::{
    cholesky_ml_fit, cholesky_to_state, state_to_cholesky, CholeskyParams, CholeskySettings,
};
pub use cost::{neg_log_likelihood, nll_gradient, CostContext, PROB_FLOOR};
pub use lsq::{levenberg_marquardt, LeastSquaresProblem, LmReport, LmSettings};
pub use pgdb::{pgdb_fit, PgdbSettings};

use crate::linalg::DensityMatrix;

/// Result of an iterative reconstruction.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub estimate: DensityMatrix,
    pub iterations: usize,
    /// `false` when the iteration cap was hit; `estimate` is then the last iterate.
    pub converged: bool,
    /// Cost after each accepted iterate, starting with the initial point.
    pub costs: Vec<f64>,
}

impl FitReport {
    pub fn cost_is_non_increasing(&self) -> bool {
        self.costs.windows(2).all(|w| w[1] <= w[0])
    }
}
