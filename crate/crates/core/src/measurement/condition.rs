use std::collections::BTreeMap;

use nalgebra::SVD;

use crate::linalg::{CMatrix, Projector};

/// Singular values below this are treated as zero (informationally incomplete set).
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Stacked, row-major vectorized projectors.
///
/// [`MeasurementMatrix::from_projectors`] scales each row by the square root
/// of the share of shots its setting family receives: projectors are grouped
/// by their axis/equator pattern, every group gets an equal share, and the
/// share is split evenly over the group's rows. With this weighting the six
/// Pauli eigenprojectors and the dense-equator limit both give κ = 2.
/// [`MeasurementMatrix::unweighted`] stacks the raw projectors.
#[derive(Debug, Clone)]
pub struct MeasurementMatrix {
    rows: CMatrix,
}

impl MeasurementMatrix {
    pub fn from_projectors(ops: &[Projector]) -> Self {
        let mut group_sizes: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for op in ops {
            *group_sizes.entry(op.axis_pattern()).or_insert(0) += 1;
        }
        let weights: Vec<f64> = ops
            .iter()
            .map(|op| (1.0 / group_sizes[&op.axis_pattern()] as f64).sqrt())
            .collect();
        Self::stack(ops, &weights)
    }

    pub fn unweighted(ops: &[Projector]) -> Self {
        Self::stack(ops, &vec![1.0; ops.len()])
    }

    fn stack(ops: &[Projector], weights: &[f64]) -> Self {
        let cols = ops.first().map_or(0, |op| op.dim() * op.dim());
        let mut rows = CMatrix::zeros(ops.len(), cols);
        for (i, (op, &w)) in ops.iter().zip(weights).enumerate() {
            assert_eq!(op.dim() * op.dim(), cols, "projectors of mixed dimension");
            let m = op.matrix();
            let d = op.dim();
            for r in 0..d {
                for c in 0..d {
                    rows[(i, r * d + c)] = m[(r, c)] * w;
                }
            }
        }
        Self { rows }
    }

    pub fn rows(&self) -> &CMatrix {
        &self.rows
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        let svd = SVD::new(self.rows.clone(), false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// σ_max / σ_min, or infinity when the columns are not all constrained.
    pub fn condition_number(&self) -> f64 {
        if self.rows.nrows() < self.rows.ncols() || self.rows.is_empty() {
            return f64::INFINITY;
        }
        let s = self.singular_values();
        let (max, min) = (s[0], s[s.len() - 1]);
        if min < SINGULAR_CUTOFF {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Condition number of the setting-weighted measurement matrix.
pub fn condition_number(ops: &[Projector]) -> f64 {
    MeasurementMatrix::from_projectors(ops).condition_number()
}
