//! Sequential Monte Carlo approximation of the Bayesian posterior over states.
//!
//! Particles are reweighted by their Born probability for each recorded
//! operator. When the effective sample size drops below a fraction of the
//! particle count, the ensemble is redrawn with the Liu-West kernel, moving
//! particles in the coordinates x_k = tr(ρ·B_k) over the non-identity Pauli
//! strings B_k (the Bloch vector for one qubit). Moves that leave state
//! space are mapped back by projecting the spectrum onto the simplex.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};
use crate::linalg::{
    hs_inner, identity, pauli_basis, project_spectrum_to_simplex, random_ginibre_state, CMatrix,
    DensityMatrix, Projector,
};
use crate::measurement::MeasurementRecord;

/// Per-particle likelihoods are clamped to this floor before renormalizing.
pub const LIKELIHOOD_FLOOR: f64 = 1e-300;
const COVARIANCE_RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BayesSettings {
    pub particles: usize,
    /// Resample when n_eff / P falls below this fraction.
    pub resample_threshold: f64,
    /// Liu-West mixing parameter a; the kernel bandwidth is h = √(1 − a²).
    pub lw_a: f64,
}

impl Default for BayesSettings {
    fn default() -> Self {
        Self {
            particles: 1000,
            resample_threshold: 0.5,
            lw_a: 0.98,
        }
    }
}

impl BayesSettings {
    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(TomographyError::invalid("at least two particles are required"));
        }
        if !(self.resample_threshold > 0.0 && self.resample_threshold < 1.0) {
            return Err(TomographyError::invalid("resample threshold must lie in (0, 1)"));
        }
        if !(self.lw_a > 0.0 && self.lw_a <= 1.0) {
            return Err(TomographyError::invalid("Liu-West parameter must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    particles: Vec<DensityMatrix>,
    weights: Vec<f64>,
    resample_threshold: f64,
    lw_a: f64,
}

impl ParticleEnsemble {
    /// `count` Ginibre-sampled particles with uniform weights.
    pub fn uniform_prior<R: Rng + ?Sized>(
        count: usize,
        dim: usize,
        settings: &BayesSettings,
        rng: &mut R,
    ) -> Result<Self> {
        let settings = BayesSettings {
            particles: count,
            ..*settings
        };
        settings.validate()?;
        if dim < 2 {
            return Err(TomographyError::invalid("state dimension must be at least 2"));
        }
        let particles = (0..count).map(|_| random_ginibre_state(dim, rng)).collect();
        Ok(Self {
            particles,
            weights: vec![1.0 / count as f64; count],
            resample_threshold: settings.resample_threshold,
            lw_a: settings.lw_a,
        })
    }

    /// Builds an ensemble from explicit particles and weights (weights are renormalized).
    pub fn from_parts(
        particles: Vec<DensityMatrix>,
        weights: Vec<f64>,
        resample_threshold: f64,
        lw_a: f64,
    ) -> Result<Self> {
        BayesSettings {
            particles: particles.len().max(2),
            resample_threshold,
            lw_a,
        }
        .validate()?;
        if particles.is_empty() || particles.len() != weights.len() {
            return Err(TomographyError::invalid("particle and weight counts differ"));
        }
        let dim = particles[0].dim();
        if let Some(p) = particles.iter().find(|p| p.dim() != dim) {
            return Err(TomographyError::DimensionMismatch {
                expected: dim,
                actual: p.dim(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(TomographyError::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(TomographyError::invalid("weights sum to zero"));
        }
        Ok(Self {
            particles,
            weights: weights.iter().map(|w| w / total).collect(),
            resample_threshold,
            lw_a,
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.particles[0].dim()
    }

    pub fn particles(&self) -> &[DensityMatrix] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resample_threshold(&self) -> f64 {
        self.resample_threshold
    }

    pub fn lw_a(&self) -> f64 {
        self.lw_a
    }

    /// Bayes-rule reweighting by ℙ(op | ρ_p) = tr(op·ρ_p).
    pub fn update(&mut self, op: &Projector) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(TomographyError::DimensionMismatch {
                expected: self.dim(),
                actual: op.dim(),
            });
        }
        let likelihoods: Vec<f64> = self
            .particles
            .iter()
            .map(|rho| hs_inner(op.matrix(), rho.matrix()).max(0.0))
            .collect();
        let evidence: f64 = likelihoods.iter().zip(&self.weights).map(|(l, w)| l * w).sum();
        if evidence.is_nan() || evidence <= 0.0 {
            return Err(TomographyError::DegeneratePosterior);
        }
        let mut total = 0.0;
        for (w, l) in self.weights.iter_mut().zip(&likelihoods) {
            *w *= l.max(LIKELIHOOD_FLOOR);
            total += *w;
        }
        for w in &mut self.weights {
            *w /= total;
        }
        Ok(())
    }

    /// n_eff = 1 / Σ w_p².
    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    pub fn needs_resampling(&self) -> bool {
        self.effective_sample_size() / self.len() as f64 <= self.resample_threshold
    }

    /// Liu-West resampling: select x_j with probability w_j, shrink towards
    /// the weighted mean (a·x_j + (1−a)·μ), perturb with N(0, h²Σ), and reset
    /// the weights to uniform.
    pub fn liu_west_resample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let count = self.len();
        let dim = self.dim();
        let selector = WeightedIndex::new(&self.weights)
            .map_err(|e| TomographyError::invalid(format!("cannot sample from weights: {e}")))?;
        let a = self.lw_a;
        let h = (1.0 - a * a).max(0.0).sqrt();

        if h == 0.0 {
            let chosen: Vec<usize> = (0..count).map(|_| selector.sample(rng)).collect();
            self.particles = chosen.into_iter().map(|j| self.particles[j].clone()).collect();
        } else {
            let basis = pauli_basis(dim.trailing_zeros() as usize);
            let coords: Vec<DVector<f64>> = self
                .particles
                .iter()
                .map(|rho| DVector::from_iterator(basis.len(), basis.iter().map(|b| hs_inner(b, rho.matrix()))))
                .collect();
            let k = basis.len();
            let mut mean = DVector::zeros(k);
            for (x, &w) in coords.iter().zip(&self.weights) {
                mean.axpy(w, x, 1.0);
            }
            let mut cov = DMatrix::zeros(k, k);
            for (x, &w) in coords.iter().zip(&self.weights) {
                let d = x - &mean;
                cov.ger(w, &d, &d, 1.0);
            }
            for i in 0..k {
                cov[(i, i)] += COVARIANCE_RIDGE;
            }
            let chol = cov
                .cholesky()
                .ok_or_else(|| TomographyError::Factorization("particle covariance".into()))?;
            let spread = chol.l().scale(h);

            let mut fresh = Vec::with_capacity(count);
            for _ in 0..count {
                let j = selector.sample(rng);
                let centre = coords[j].scale(a) + mean.scale(1.0 - a);
                let z = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = centre + &spread * z;
                fresh.push(state_from_coordinates(&x, &basis, dim)?);
            }
            self.particles = fresh;
        }
        self.weights = vec![1.0 / count as f64; count];
        Ok(())
    }

    /// Posterior mean Σ_p w_p ρ_p.
    pub fn estimate(&self) -> DensityMatrix {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for (rho, &w) in self.particles.iter().zip(&self.weights) {
            acc += rho.matrix().scale(w);
        }
        DensityMatrix::from_trusted(crate::linalg::hermitian_part(&acc))
    }
}

fn state_from_coordinates(x: &DVector<f64>, basis: &[CMatrix], dim: usize) -> Result<DensityMatrix> {
    let mut m = identity(dim);
    for (xk, b) in x.iter().zip(basis) {
        m += b.scale(*xk);
    }
    project_spectrum_to_simplex(&m.unscale(dim as f64))
}

#[derive(Debug, Clone)]
pub struct BayesReport {
    pub estimate: DensityMatrix,
    pub updates: usize,
    pub resamples: usize,
}

/// Runs the particle filter over every event of `record`: all z-axis events
/// first, then the events with equatorial factors, each phase in random order.
/// Binned events are expanded into one update per count.
pub fn run_bayesian_tomography<R: Rng + ?Sized>(
    record: &MeasurementRecord,
    settings: &BayesSettings,
    rng: &mut R,
) -> Result<BayesReport> {
    settings.validate()?;
    let mut operators = Vec::with_capacity(record.events().len());
    let mut axis_schedule = Vec::new();
    let mut equator_schedule = Vec::new();
    for (idx, event) in record.events().iter().enumerate() {
        operators.push(event.projector()?);
        let schedule = if event.is_axis_only() {
            &mut axis_schedule
        } else {
            &mut equator_schedule
        };
        schedule.extend(std::iter::repeat_n(idx, event.multiplicity as usize));
    }
    axis_schedule.shuffle(rng);
    equator_schedule.shuffle(rng);

    let mut ensemble = ParticleEnsemble::uniform_prior(settings.particles, record.dim(), settings, rng)?;
    let mut resamples = 0;
    let mut updates = 0;
    for idx in axis_schedule.into_iter().chain(equator_schedule) {
        ensemble.update(&operators[idx])?;
        updates += 1;
        if ensemble.needs_resampling() {
            ensemble.liu_west_resample(rng)?;
            resamples += 1;
        }
    }
    Ok(BayesReport {
        estimate: ensemble.estimate(),
        updates,
        resamples,
    })
}
