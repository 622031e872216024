use num_complex::Complex64;

use crate::error::{Result, TomographyError};
use crate::linalg::{CMatrix, DensityMatrix, Projector};
use crate::measurement::MeasurementRecord;

/// Probabilities are clamped to this floor before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-300;

/// Distinct measurement operators with their observed multiplicities.
#[derive(Debug, Clone)]
pub struct CostContext {
    dim: usize,
    operators: Vec<Projector>,
    counts: Vec<f64>,
    // operator entries laid out like the nalgebra storage (column-major)
    flat: Vec<Complex64>,
}

impl CostContext {
    pub fn new(operators: Vec<Projector>, counts: Vec<f64>) -> Result<Self> {
        if operators.is_empty() {
            return Err(TomographyError::invalid("cost context needs at least one operator"));
        }
        if operators.len() != counts.len() {
            return Err(TomographyError::invalid(format!(
                "{} operators but {} counts",
                operators.len(),
                counts.len()
            )));
        }
        if let Some(c) = counts.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(TomographyError::invalid(format!("count {c} is not positive")));
        }
        let dim = operators[0].dim();
        let mut flat = Vec::with_capacity(operators.len() * dim * dim);
        for op in &operators {
            if op.dim() != dim {
                return Err(TomographyError::DimensionMismatch {
                    expected: dim,
                    actual: op.dim(),
                });
            }
            flat.extend_from_slice(op.matrix().as_slice());
        }
        Ok(Self {
            dim,
            operators,
            counts,
            flat,
        })
    }

    pub fn from_record(record: &MeasurementRecord) -> Result<Self> {
        let (ops, counts) = record.operators_with_counts()?.into_iter().unzip();
        Self::new(ops, counts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[Projector] {
        &self.operators
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Number of distinct operators.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }

    fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(TomographyError::DimensionMismatch {
                expected: self.dim,
                actual: m.nrows(),
            });
        }
        Ok(())
    }

    fn chunks(&self) -> impl Iterator<Item = &[Complex64]> {
        self.flat.chunks_exact(self.dim * self.dim)
    }

    /// Clamped Born probabilities `max(tr(ρ·op_j), PROB_FLOOR)`.
    pub(crate) fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        let r = rho.as_slice();
        self.chunks()
            .map(|op| {
                let p: f64 = op.iter().zip(r).map(|(o, x)| o.re * x.re + o.im * x.im).sum();
                p.max(PROB_FLOOR)
            })
            .collect()
    }

    pub(crate) fn cost(&self, rho: &CMatrix) -> f64 {
        self.probabilities(rho)
            .iter()
            .zip(&self.counts)
            .map(|(p, n)| -n * p.ln())
            .sum()
    }

    /// −Σ_j (n_j/p_j)·op_j.
    pub(crate) fn gradient(&self, rho: &CMatrix) -> CMatrix {
        let probs = self.probabilities(rho);
        let mut g = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for ((op, p), n) in self.chunks().zip(&probs).zip(&self.counts) {
            let w = -n / p;
            for (gi, oi) in g.iter_mut().zip(op) {
                *gi += oi * w;
            }
        }
        CMatrix::from_vec(self.dim, self.dim, g)
    }
}

/// 𝒞(ρ) = −Σ_j n_j·log p_j.
pub fn neg_log_likelihood(rho: &DensityMatrix, ctx: &CostContext) -> Result<f64> {
    ctx.check_dim(rho.matrix())?;
    Ok(ctx.cost(rho.matrix()))
}

/// ∇𝒞(ρ) = −Σ_j (n_j/p_j)·op_j, using the clamped probabilities.
pub fn nll_gradient(rho: &DensityMatrix, ctx: &CostContext) -> Result<CMatrix> {
    ctx.check_dim(rho.matrix())?;
    Ok(ctx.gradient(rho.matrix()))
}
