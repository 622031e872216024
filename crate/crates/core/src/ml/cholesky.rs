use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};
use crate::linalg::{hermitian_part, CMatrix, DensityMatrix};

use super::cost::CostContext;
use super::lsq::{levenberg_marquardt, LeastSquaresProblem, LmSettings};
use super::FitReport;

/// Real parameter vector of length 4^m for the lower-triangular factor T(t).
///
/// The first 2^m entries fill the diagonal. The remaining entries are
/// (real, imaginary) pairs filling the strictly lower triangle row by row,
/// each row from the sub-diagonal leftwards: (1,0), (2,1), (2,0), (3,2), ...
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyParams(Vec<f64>);

impl CholeskyParams {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        let n = t.len();
        let dim = (n as f64).sqrt().round() as usize;
        if n < 4 || dim * dim != n || !dim.is_power_of_two() {
            return Err(TomographyError::invalid(format!(
                "parameter length {n} is not a power of 4"
            )));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(TomographyError::invalid("parameters must be finite"));
        }
        if t.iter().all(|&x| x == 0.0) {
            return Err(TomographyError::invalid("all-zero parameters do not define a state"));
        }
        Ok(Self(t))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        (self.0.len() as f64).sqrt().round() as usize
    }
}

/// Strictly-lower positions in parameter-pair order.
fn lower_positions(dim: usize) -> Vec<(usize, usize)> {
    (1..dim)
        .flat_map(|row| (0..row).rev().map(move |col| (row, col)))
        .collect()
}

fn lower_factor(t: &[f64], dim: usize) -> CMatrix {
    let mut factor = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        factor[(i, i)] = Complex64::new(t[i], 0.0);
    }
    for (p, (r, c)) in lower_positions(dim).into_iter().enumerate() {
        factor[(r, c)] = Complex64::new(t[dim + 2 * p], t[dim + 2 * p + 1]);
    }
    factor
}

/// ρ = T†T / tr(T†T).
pub fn cholesky_to_state(params: &CholeskyParams) -> DensityMatrix {
    let t = params.as_slice();
    let factor = lower_factor(t, params.dim());
    let gram = factor.adjoint() * &factor;
    let norm: f64 = t.iter().map(|x| x * x).sum();
    DensityMatrix::from_trusted(hermitian_part(&gram.unscale(norm)))
}

/// Inverse of [`cholesky_to_state`] for full-rank states, with tr(T†T) = 1.
pub fn state_to_cholesky(rho: &DensityMatrix) -> Result<CholeskyParams> {
    let d = rho.dim();
    let min_eig = rho.min_eigenvalue();
    if min_eig <= 1e-14 {
        return Err(TomographyError::Factorization(format!(
            "state is rank deficient (smallest eigenvalue {min_eig:e})"
        )));
    }
    // T†T = ρ with T lower triangular  ⇔  (JρJ) = L L† with T = J L† J
    let flip = |m: &CMatrix| CMatrix::from_fn(d, d, |i, j| m[(d - 1 - i, d - 1 - j)]);
    let flipped = flip(rho.matrix());
    let chol = Cholesky::new(flipped)
        .ok_or_else(|| TomographyError::Factorization("Cholesky factorization failed".into()))?;
    let factor = flip(&chol.l().adjoint());

    let mut t = vec![0.0; d * d];
    for i in 0..d {
        t[i] = factor[(i, i)].re;
    }
    for (p, (r, c)) in lower_positions(d).into_iter().enumerate() {
        t[d + 2 * p] = factor[(r, c)].re;
        t[d + 2 * p + 1] = factor[(r, c)].im;
    }
    CholeskyParams::new(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CholeskySettings {
    pub max_iters: usize,
    /// Relative change in Σr² treated as convergence.
    pub ftol: f64,
    /// Standard deviation of the noise added to the maximally mixed start.
    pub init_noise: f64,
}

impl Default for CholeskySettings {
    fn default() -> Self {
        Self {
            max_iters: 500,
            ftol: 1e-8,
            init_noise: 1e-2,
        }
    }
}

struct CholeskyProblem<'a> {
    ctx: &'a CostContext,
    dim: usize,
    positions: Vec<(usize, usize)>,
}

impl CholeskyProblem<'_> {
    /// Clamped probabilities, unnormalized overlaps q_j = tr(O_j T†T), and s = tr(T†T).
    fn evaluate(&self, t: &[f64]) -> (CMatrix, Vec<f64>, f64) {
        let factor = lower_factor(t, self.dim);
        let gram = factor.adjoint() * &factor;
        let s: f64 = t.iter().map(|x| x * x).sum();
        let probs = self.ctx.probabilities(&gram.unscale(s));
        (factor, probs, s)
    }

    fn residual(n: f64, p: f64) -> f64 {
        (-n * p.min(1.0).ln()).max(0.0).sqrt()
    }
}

impl LeastSquaresProblem for CholeskyProblem<'_> {
    fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let (_, probs, _) = self.evaluate(x.as_slice());
        DVector::from_iterator(
            probs.len(),
            probs.iter().zip(self.ctx.counts()).map(|(&p, &n)| Self::residual(n, p)),
        )
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let t = x.as_slice();
        let d = self.dim;
        let (factor, probs, s) = self.evaluate(t);
        let factor_adj = factor.adjoint();
        let nparams = t.len();
        let mut jac = DMatrix::zeros(probs.len(), nparams);
        let i = Complex64::i();
        for (j, op) in self.ctx.operators().iter().enumerate() {
            let p = probs[j];
            let n = self.ctx.counts()[j];
            let r = Self::residual(n, p).max(1e-8);
            let dr_dp = -n / (2.0 * r * p);
            // (O T†)_{b,a} for every factor position (a, b)
            let ot = op.matrix() * &factor_adj;
            let mut put = |k: usize, coeff: Complex64, a: usize, b: usize| {
                let dq = 2.0 * (coeff * ot[(b, a)]).re;
                let dp = (dq - p * 2.0 * t[k]) / s;
                jac[(j, k)] = dr_dp * dp;
            };
            for k in 0..d {
                put(k, Complex64::new(1.0, 0.0), k, k);
            }
            for (pidx, &(a, b)) in self.positions.iter().enumerate() {
                put(d + 2 * pidx, Complex64::new(1.0, 0.0), a, b);
                put(d + 2 * pidx + 1, i, a, b);
            }
        }
        jac
    }

    fn normalize(&self, x: &mut DVector<f64>) {
        let norm = x.norm();
        if norm > 0.0 {
            x.unscale_mut(norm);
        }
    }
}

/// Maximum-likelihood fit over the Cholesky parametrization, posed as
/// least squares with residuals r_j = √(−n_j·log p_j) so that Σr_j² = 𝒞.
pub fn cholesky_ml_fit<R: Rng + ?Sized>(
    ctx: &CostContext,
    qubits: usize,
    settings: &CholeskySettings,
    rng: &mut R,
) -> Result<FitReport> {
    let dim = ctx.dim();
    if qubits == 0 || dim != 1 << qubits {
        return Err(TomographyError::DimensionMismatch {
            expected: dim,
            actual: 1usize.checked_shl(qubits as u32).unwrap_or(0),
        });
    }
    let problem = CholeskyProblem {
        ctx,
        dim,
        positions: lower_positions(dim),
    };
    let mut start = vec![0.0; dim * dim];
    for (k, x) in start.iter_mut().enumerate() {
        let noise: f64 = rng.sample(StandardNormal);
        *x = if k < dim { 1.0 } else { 0.0 } + settings.init_noise * noise;
    }
    let lm = LmSettings {
        max_iters: settings.max_iters,
        ftol: settings.ftol,
        ..LmSettings::default()
    };
    let report = levenberg_marquardt(&problem, DVector::from_vec(start), &lm);
    let params = CholeskyParams::new(report.x.as_slice().to_vec())?;
    Ok(FitReport {
        estimate: cholesky_to_state(&params),
        iterations: report.iterations,
        converged: report.converged,
        costs: report.costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_ginibre_state, z_down, z_up};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn diag(a: f64, b: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[a.into(), 0.0.into(), 0.0.into(), b.into()])
    }

    #[test]
    fn parameter_examples() {
        let up = cholesky_to_state(&CholeskyParams::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap());
        assert!(max_diff(up.matrix(), &diag(1.0, 0.0)) < 1e-15);
        let mixed = cholesky_to_state(&CholeskyParams::new(vec![1.0, 1.0, 0.0, 0.0]).unwrap());
        assert!(max_diff(mixed.matrix(), &diag(0.5, 0.5)) < 1e-15);
    }

    #[test]
    fn row_layout_for_two_qubits() {
        let mut t = vec![0.0; 16];
        t[14] = 3.0; // real part of the last pair
        t[15] = 4.0;
        let factor = lower_factor(&t, 4);
        assert_eq!(factor[(3, 0)], Complex64::new(3.0, 4.0));
        t[4] = 7.0;
        assert_eq!(lower_factor(&t, 4)[(1, 0)], Complex64::new(7.0, 0.0));
        t[12] = 5.0;
        assert_eq!(lower_factor(&t, 4)[(3, 1)], Complex64::new(5.0, 0.0));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CholeskyParams::new(vec![0.0; 4]).is_err());
        assert!(CholeskyParams::new(vec![1.0; 5]).is_err());
        assert!(CholeskyParams::new(vec![1.0; 9]).is_err());
    }

    #[test]
    fn any_params_give_a_valid_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for len in [4, 16] {
            for _ in 0..20 {
                let t: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
                cholesky_to_state(&CholeskyParams::new(t).unwrap()).validate().unwrap();
            }
        }
    }

    #[test]
    fn factor_examples() {
        let t = state_to_cholesky(&DensityMatrix::maximally_mixed(2)).unwrap();
        let s = t.as_slice();
        assert!((s[0] - s[1]).abs() < 1e-15 && s[2] == 0.0 && s[3] == 0.0);

        let rho = DensityMatrix::new(diag(0.75, 0.25)).unwrap();
        let s = state_to_cholesky(&rho).unwrap();
        let s = s.as_slice();
        assert!((s[0] - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((s[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn round_trip_on_ginibre_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 4] {
            for _ in 0..100 {
                let rho = random_ginibre_state(dim, &mut rng);
                let back = cholesky_to_state(&state_to_cholesky(&rho).unwrap());
                assert!(rho.distance(&back) < 1e-10);
            }
        }
    }

    #[test]
    fn rank_deficient_state_rejected() {
        let rho = DensityMatrix::new(diag(1.0, 0.0)).unwrap();
        assert!(matches!(state_to_cholesky(&rho), Err(TomographyError::Factorization(_))));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ops: Vec<_> = (0..6)
            .map(|k| crate::linalg::equatorial_projector(k as f64).unwrap())
            .chain([z_up(), z_down()])
            .collect();
        let ctx = CostContext::new(ops, vec![1.0, 2.0, 1.0, 3.0, 1.0, 1.0, 4.0, 5.0]).unwrap();
        let problem = CholeskyProblem { ctx: &ctx, dim: 2, positions: lower_positions(2) };
        let x = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(StandardNormal));
        let jac = problem.jacobian(&x);
        let h = 1e-6;
        for k in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (problem.residuals(&xp) - problem.residuals(&xm)) / (2.0 * h);
            for j in 0..ctx.len() {
                assert!((fd[j] - jac[(j, k)]).abs() < 1e-5 * (1.0 + fd[j].abs()));
            }
        }
    }

    #[test]
    fn binomial_mle_from_axis_counts() {
        let ctx = CostContext::new(vec![z_up(), z_down()], vec![8000.0, 2000.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fit = cholesky_ml_fit(&ctx, 1, &CholeskySettings::default(), &mut rng).unwrap();
        let m = fit.estimate.matrix();
        assert!((m[(0, 0)].re - 0.8).abs() < 0.02);
        assert!((m[(1, 1)].re - 0.2).abs() < 0.02);
        fit.estimate.validate().unwrap();
    }
}
