use nalgebra::{DMatrix, DVector};

/// A nonlinear least-squares problem min ½‖r(x)‖².
pub trait LeastSquaresProblem {
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Hook to move `x` along a direction the residuals are invariant to.
    fn normalize(&self, _x: &mut DVector<f64>) {}
}

#[derive(Debug, Clone, Copy)]
pub struct LmSettings {
    pub max_iters: usize,
    /// Relative cost change treated as convergence.
    pub ftol: f64,
    pub xtol: f64,
    pub gtol: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iters: 500,
            ftol: 1e-8,
            xtol: 1e-12,
            gtol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmReport {
    pub x: DVector<f64>,
    /// Σ r_j² at each accepted iterate.
    pub costs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Levenberg-Marquardt with trust-region style damping updates.
pub fn levenberg_marquardt<P: LeastSquaresProblem>(
    problem: &P,
    x0: DVector<f64>,
    settings: &LmSettings,
) -> LmReport {
    let mut x = x0;
    problem.normalize(&mut x);
    let mut r = problem.residuals(&x);
    let mut cost = r.norm_squared();
    let mut costs = vec![cost];
    let mut jac = problem.jacobian(&x);
    let mut jtj = jac.tr_mul(&jac);
    let mut grad = jac.tr_mul(&r);
    let mut lambda = 1e-3 * jtj.diagonal().max().max(1e-12);
    let mut nu = 2.0;
    let n = x.len();

    for iter in 0..settings.max_iters {
        if grad.amax() <= settings.gtol {
            return LmReport { x, costs, iterations: iter, converged: true };
        }
        let mut system = jtj.clone();
        for i in 0..n {
            system[(i, i)] += lambda;
        }
        let step = match system.cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => {
                lambda *= nu;
                nu *= 2.0;
                continue;
            }
        };
        if step.norm() <= settings.xtol * (x.norm() + settings.xtol) {
            return LmReport { x, costs, iterations: iter, converged: true };
        }

        let mut candidate = &x + &step;
        let r_new = problem.residuals(&candidate);
        let cost_new = r_new.norm_squared();
        // model reduction of ‖r‖² is stepᵀ(λ·step − g)
        let predicted = step.dot(&(step.scale(lambda) - &grad));
        let actual = cost - cost_new;
        let gain = if predicted > 0.0 { actual / predicted } else { -1.0 };

        if actual > 0.0 && gain > 0.0 {
            problem.normalize(&mut candidate);
            let rel_change = actual / cost.max(f64::MIN_POSITIVE);
            x = candidate;
            r = problem.residuals(&x);
            cost = r.norm_squared();
            costs.push(cost);
            jac = problem.jacobian(&x);
            jtj = jac.tr_mul(&jac);
            grad = jac.tr_mul(&r);
            lambda *= (1.0 - (2.0 * gain - 1.0).powi(3)).max(1.0 / 3.0);
            nu = 2.0;
            if rel_change < settings.ftol && gain > 0.25 {
                return LmReport { x, costs, iterations: iter + 1, converged: true };
            }
        } else {
            lambda *= nu;
            nu *= 2.0;
            // no representable step reduces the cost any further
            if lambda > 1e32 {
                return LmReport { x, costs, iterations: iter + 1, converged: true };
            }
        }
    }
    let iterations = settings.max_iters;
    LmReport { x, costs, iterations, converged: false }
}
