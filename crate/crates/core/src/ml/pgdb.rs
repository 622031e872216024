use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};
use crate::linalg::{hs_inner, hs_norm_sqr, project_spectrum_to_simplex, DensityMatrix};

use super::cost::CostContext;
use super::FitReport;

/// Halvings of the line-search parameter before a step is abandoned.
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PgdbSettings {
    /// Exit once the trailing-window sum of |Δ𝒞| falls to this value.
    pub delta: f64,
    /// Armijo sufficient-decrease constant.
    pub gamma: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub window: usize,
    pub max_iters: usize,
}

impl Default for PgdbSettings {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            gamma: 1e-3,
            mu_min: 1e-4,
            mu_max: 1e4,
            window: 20,
            max_iters: 10_000,
        }
    }
}

impl PgdbSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.delta, self.gamma, self.mu_min, self.mu_max]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !positive || self.window == 0 || self.max_iters == 0 || self.mu_min >= self.mu_max {
            return Err(TomographyError::invalid(format!("invalid PGDB settings {self:?}")));
        }
        Ok(())
    }
}

/// Projected gradient descent with Armijo backtracking.
///
/// Starting from the maximally mixed state with step scale μ = 1, each
/// iteration forms the direction D = 𝒫_S(ρ − ∇𝒞/μ) − ρ, halves α from 1 until
/// 𝒞(ρ + αD) ≤ 𝒞(ρ) + γ·α·⟨D, ∇𝒞⟩, and moves to ρ + αD. The next μ is the
/// clamped quotient ⟨ρ_k − ρ_{k−1}, ∇𝒞_k − ∇𝒞_{k−1}⟩ / ‖ρ_k − ρ_{k−1}‖². The
/// loop ends when the last `window` cost changes sum to at most `delta`.
pub fn pgdb_fit(ctx: &CostContext, dim: usize, settings: &PgdbSettings) -> Result<FitReport> {
    settings.validate()?;
    if ctx.dim() != dim {
        return Err(TomographyError::DimensionMismatch {
            expected: ctx.dim(),
            actual: dim,
        });
    }

    let mut rho = DensityMatrix::maximally_mixed(dim).into_matrix();
    let mut cost = ctx.cost(&rho);
    let mut grad = ctx.gradient(&rho);
    let mut mu = 1.0;
    let mut previous = None;
    let mut changes: VecDeque<f64> = VecDeque::with_capacity(settings.window);
    let mut costs = vec![cost];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iters {
        if changes.len() == settings.window && changes.iter().sum::<f64>() <= settings.delta {
            converged = true;
            break;
        }

        let target = &rho - grad.unscale(mu);
        let direction = project_spectrum_to_simplex(&target)?.into_matrix() - &rho;
        let slope = hs_inner(&direction, &grad);

        // a predicted decrease below the rounding error of 𝒞 cannot be
        // verified by the Armijo test; such a direction is treated as zero
        let halvings = if slope < -4.0 * f64::EPSILON * cost.abs().max(1.0) {
            MAX_HALVINGS
        } else {
            0
        };
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..halvings {
            let candidate = &rho + direction.scale(alpha);
            let c = ctx.cost(&candidate);
            if c <= cost + settings.gamma * alpha * slope {
                accepted = Some((candidate, c));
                break;
            }
            alpha *= 0.5;
        }
        let (next, next_cost) = accepted.unwrap_or_else(|| (rho.clone(), cost));

        let next_mu = match &previous {
            Some((prev_rho, prev_grad)) => {
                let step = &rho - prev_rho;
                let step_sqr = hs_norm_sqr(&step);
                if step_sqr > 0.0 {
                    let curvature = hs_inner(&step, &(&grad - prev_grad)) / step_sqr;
                    curvature.max(settings.mu_min).min(settings.mu_max)
                } else {
                    mu
                }
            }
            None => mu,
        };

        let old_rho = std::mem::replace(&mut rho, next);
        let old_grad = std::mem::replace(&mut grad, ctx.gradient(&rho));
        previous = Some((old_rho, old_grad));
        if changes.len() == settings.window {
            changes.pop_front();
        }
        changes.push_back((next_cost - cost).abs());
        cost = next_cost;
        costs.push(cost);
        mu = next_mu;
        iterations += 1;
    }
    if !converged && changes.len() == settings.window && changes.iter().sum::<f64>() <= settings.delta {
        converged = true;
    }

    Ok(FitReport {
        estimate: project_spectrum_to_simplex(&rho)?,
        iterations,
        converged,
        costs,
    })
}
