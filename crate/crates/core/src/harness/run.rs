use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::run_bayesian_tomography;
use crate::error::{Result, TomographyError};
use crate::linalg::{infidelity, random_ginibre_state, DensityMatrix};
use crate::measurement::{coarse_grain, simulate_multiqubit_record, simulate_sparse_record, MeasurementRecord};
use crate::ml::{cholesky_ml_fit, pgdb_fit, CostContext};

use super::config::{Algorithm, ExperimentConfig};

/// Counter-based seed for trial `index`: a SplitMix64 finalizer over the
/// master seed advanced `index + 1` golden-ratio increments.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpedStates {
    /// Row-major (re, im) pairs.
    pub truth: Vec<[f64; 2]>,
    pub estimate: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// 1 − F(ρ_est, ρ_true); `None` when the trial failed.
    pub infidelity: Option<f64>,
    /// Reconstruction time only; simulation and binning are excluded.
    pub wall_seconds: f64,
    /// Set when the solver stopped at its iteration cap.
    pub warning: bool,
    /// Whether the per-iteration cost never increased (iterative ML solvers only).
    pub cost_monotone: Option<bool>,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<DumpedStates>,
}

impl TrialResult {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn dumped_truth(&self) -> Option<Result<DensityMatrix>> {
        self.states.as_ref().map(|s| unflatten(&s.truth))
    }

    pub fn dumped_estimate(&self) -> Option<Result<DensityMatrix>> {
        self.states.as_ref().map(|s| unflatten(&s.estimate))
    }
}

fn flatten(rho: &DensityMatrix) -> Vec<[f64; 2]> {
    let m = rho.matrix();
    let d = m.nrows();
    (0..d * d).map(|k| {
        let z = m[(k / d, k % d)];
        [z.re, z.im]
    })
    .collect()
}

fn unflatten(entries: &[[f64; 2]]) -> Result<DensityMatrix> {
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d * d != entries.len() {
        return Err(TomographyError::invalid("dumped state is not square"));
    }
    let m = crate::linalg::CMatrix::from_fn(d, d, |i, j| {
        let [re, im] = entries[i * d + j];
        num_complex::Complex64::new(re, im)
    });
    DensityMatrix::new(m)
}

/// Draws the true state and the (possibly coarse-grained) record for a trial.
/// Shares its random stream with the reconstruction that follows, so configs
/// differing only in binning or algorithm see the same states and records.
pub fn trial_inputs(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<(DensityMatrix, MeasurementRecord)> {
    let truth = random_ginibre_state(cfg.dim(), rng);
    let sparse = if cfg.qubits == 1 {
        simulate_sparse_record(&truth, cfg.events, &cfg.distribution, cfg.phi, rng)?
    } else {
        simulate_multiqubit_record(&truth, cfg.events, &cfg.distribution, rng)?
    };
    let record = match cfg.binning.bins() {
        Some(n) => coarse_grain(&sparse, n)?,
        None => sparse,
    };
    Ok((truth, record))
}

struct Reconstruction {
    estimate: DensityMatrix,
    warning: bool,
    cost_monotone: Option<bool>,
}

fn reconstruct(cfg: &ExperimentConfig, record: &MeasurementRecord, rng: &mut ChaCha8Rng) -> Result<Reconstruction> {
    match cfg.algorithm {
        Algorithm::Pgdb => {
            let ctx = CostContext::from_record(record)?;
            let fit = pgdb_fit(&ctx, record.dim(), &cfg.pgdb)?;
            Ok(Reconstruction {
                warning: !fit.converged,
                cost_monotone: Some(fit.cost_is_non_increasing()),
                estimate: fit.estimate,
            })
        }
        Algorithm::Cholesky => {
            let ctx = CostContext::from_record(record)?;
            let fit = cholesky_ml_fit(&ctx, record.qubits(), &cfg.cholesky, rng)?;
            Ok(Reconstruction {
                warning: !fit.converged,
                cost_monotone: Some(fit.cost_is_non_increasing()),
                estimate: fit.estimate,
            })
        }
        Algorithm::Bayes => {
            let report = run_bayesian_tomography(record, &cfg.bayes, rng)?;
            Ok(Reconstruction {
                estimate: report.estimate,
                warning: false,
                cost_monotone: None,
            })
        }
    }
}

/// Reconstructs `record` with the algorithm and settings of `cfg`, returning
/// the estimate and the reconstruction wall time.
pub fn reconstruct_record(
    cfg: &ExperimentConfig,
    record: &MeasurementRecord,
    rng: &mut ChaCha8Rng,
) -> Result<(DensityMatrix, f64)> {
    let start = Instant::now();
    let rec = reconstruct(cfg, record, rng)?;
    Ok((rec.estimate, start.elapsed().as_secs_f64()))
}

pub fn run_trial(cfg: &ExperimentConfig, index: usize) -> TrialResult {
    let seed = trial_seed(cfg.master_seed, index as u64);
    let mut result = TrialResult {
        trial: index,
        seed,
        infidelity: None,
        wall_seconds: 0.0,
        warning: false,
        cost_monotone: None,
        error: None,
        states: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = trial_inputs(cfg, &mut rng).and_then(|(truth, record)| {
        let start = Instant::now();
        let rec = reconstruct(cfg, &record, &mut rng)?;
        let elapsed = start.elapsed().as_secs_f64();
        Ok((truth, rec, elapsed))
    });
    match outcome.and_then(|(truth, rec, elapsed)| {
        let inf = infidelity(&rec.estimate, &truth)?;
        Ok((truth, rec, elapsed, inf))
    }) {
        Ok((truth, rec, elapsed, inf)) => {
            result.infidelity = Some(inf);
            result.wall_seconds = elapsed;
            result.warning = rec.warning;
            result.cost_monotone = rec.cost_monotone;
            if cfg.dump_states {
                result.states = Some(DumpedStates {
                    truth: flatten(&truth),
                    estimate: flatten(&rec.estimate),
                });
            }
        }
        Err(e) => result.error = Some(e.to_string()),
    }
    result
}

/// Runs every trial of `cfg`. Failed trials are reported in their result and
/// do not stop the run; the output is ordered by trial index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    let results = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect()
    } else {
        (0..cfg.trials).map(|i| run_trial(cfg, i)).collect()
    };
    Ok(results)
}
