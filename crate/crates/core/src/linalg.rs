//! Complex linear algebra for small (2^m-dimensional) quantum states.
//!
//! Basis convention: index 0 is |↑⟩ and index 1 is |↓⟩, so σ_z = diag(1, −1).
//! Multi-qubit operators are Kronecker products with qubit 0 as the most
//! significant factor.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};

pub type CMatrix = DMatrix<Complex64>;

/// Hermiticity tolerance for validated states.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for validated states.
pub const TRACE_TOL: f64 = 1e-10;
/// Lowest eigenvalue accepted for a validated state.
pub const EIGEN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::i();
    CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real Hilbert-Schmidt inner product `Re tr(A†B)`.
///
/// Every matrix inner product and norm used by the solvers goes through this.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn hs_norm_sqr(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Largest entrywise deviation from Hermiticity, `max |a_ij − conj(a_ji)|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues are returned unsorted.
pub fn hermitian_eigen(a: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    (eig.eigenvalues, eig.eigenvectors)
}

/// `V · diag(values) · V†`, exactly Hermitian.
pub fn from_spectrum(values: &[f64], vectors: &CMatrix) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        for i in 0..n {
            let vi = v[i] * lam;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    hermitian_part(&out)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues
/// below zero (round-off) are clamped.
pub fn psd_sqrt(a: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(a);
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    from_spectrum(&roots, &vecs)
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("dim", &self.dim())
            .field("entries", &self.entries.as_slice())
            .finish()
    }
}

impl DensityMatrix {
    /// Validates `entries` against the state invariants.
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_state(&entries)?;
        Ok(Self { entries })
    }

    /// Wraps a matrix the caller has already guaranteed to be a valid state.
    pub(crate) fn from_trusted(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: identity(dim).unscale(dim as f64),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) non-zero vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm_sqr.is_nan() || norm_sqr <= 0.0 || !norm_sqr.is_finite() {
            return Err(TomographyError::invalid("pure state needs a finite non-zero vector"));
        }
        let v = DVector::from_column_slice(psi).unscale(norm_sqr.sqrt());
        Ok(Self {
            entries: hermitian_part(&(&v * v.adjoint())),
        })
    }

    /// Convex combination `Σ_k w_k ρ_k` of states of a common dimension.
    /// Weights must be non-negative and sum to one within `TRACE_TOL`.
    pub fn mixture<'a>(terms: impl IntoIterator<Item = (f64, &'a DensityMatrix)>) -> Result<Self> {
        let mut acc: Option<CMatrix> = None;
        let mut total = 0.0;
        for (w, rho) in terms {
            if w.is_nan() || w < 0.0 {
                return Err(TomographyError::invalid("mixture weights must be non-negative"));
            }
            total += w;
            match acc.as_mut() {
                None => acc = Some(rho.entries.scale(w)),
                Some(m) => {
                    if m.nrows() != rho.dim() {
                        return Err(TomographyError::DimensionMismatch {
                            expected: m.nrows(),
                            actual: rho.dim(),
                        });
                    }
                    *m += rho.entries.scale(w);
                }
            }
        }
        let m = acc.ok_or_else(|| TomographyError::invalid("empty mixture"))?;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(TomographyError::invalid(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            entries: hermitian_part(&m),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (vals, _) = hermitian_eigen(&self.entries);
        let mut v: Vec<f64> = vals.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Born probability `tr(ρ·op)`.
    pub fn probability(&self, op: &Projector) -> f64 {
        hs_inner(op.matrix(), &self.entries)
    }

    /// Re-checks the invariants. Useful after deserialization or long pipelines.
    pub fn validate(&self) -> Result<()> {
        check_state(&self.entries)
    }

    /// Frobenius distance to another state.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        hs_norm_sqr(&(&self.entries - &other.entries)).sqrt()
    }
}

fn check_state(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 || !m.is_square() {
        return Err(TomographyError::invalid("density matrix must be square and non-empty"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(TomographyError::invalid("density matrix has non-finite entries"));
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(TomographyError::invalid(format!(
            "density matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(TomographyError::invalid(format!("density matrix has trace {tr}")));
    }
    let (vals, _) = hermitian_eigen(m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -EIGEN_TOL {
        return Err(TomographyError::invalid(format!(
            "density matrix has negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Projectors and phase rotations
// ---------------------------------------------------------------------------

/// Single-qubit factor of a measurement projector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FactorLabel {
    Up,
    Down,
    /// Projector onto (|↑⟩ + e^{iφ}|↓⟩)/√2.
    Equator(f64),
}

impl FactorLabel {
    pub fn is_axis(&self) -> bool {
        matches!(self, FactorLabel::Up | FactorLabel::Down)
    }
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorLabel::Up => write!(f, "z-up"),
            FactorLabel::Down => write!(f, "z-down"),
            FactorLabel::Equator(phi) => write!(f, "eq({phi})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    entries: CMatrix,
    label: Vec<FactorLabel>,
}

impl Projector {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// One label per qubit factor.
    pub fn label(&self) -> &[FactorLabel] {
        &self.label
    }

    /// Setting pattern of the projector: `true` where a factor lies on the z-axis.
    pub fn axis_pattern(&self) -> Vec<bool> {
        self.label.iter().map(FactorLabel::is_axis).collect()
    }

    pub fn from_label(label: &[FactorLabel]) -> Result<Self> {
        let factors = label
            .iter()
            .map(|f| factor_projector(*f))
            .collect::<Result<Vec<_>>>()?;
        tensor_projectors(&factors)
    }
}

fn factor_projector(label: FactorLabel) -> Result<Projector> {
    match label {
        FactorLabel::Up => Ok(z_up()),
        FactorLabel::Down => Ok(z_down()),
        FactorLabel::Equator(phi) => equatorial_projector(phi),
    }
}

pub fn z_up() -> Projector {
    Projector {
        entries: CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]),
        label: vec![FactorLabel::Up],
    }
}

pub fn z_down() -> Projector {
    Projector {
        entries: CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]),
        label: vec![FactorLabel::Down],
    }
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Rank-1 projector onto (|↑⟩ + e^{iφ}|↓⟩)/√2. The stored label angle is reduced to [0, 2π).
pub fn equatorial_projector(phi: f64) -> Result<Projector> {
    if !phi.is_finite() {
        return Err(TomographyError::invalid("equatorial angle must be finite"));
    }
    let phi = wrap_angle(phi);
    let e = Complex64::from_polar(0.5, phi);
    let half = Complex64::new(0.5, 0.0);
    Ok(Projector {
        entries: CMatrix::from_row_slice(2, 2, &[half, e.conj(), e, half]),
        label: vec![FactorLabel::Equator(phi)],
    })
}

/// Kronecker product of single-qubit projectors, first factor most significant.
pub fn tensor_projectors(factors: &[Projector]) -> Result<Projector> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| TomographyError::invalid("tensor product of an empty factor list"))?;
    let mut entries = first.entries.clone();
    let mut label = first.label.clone();
    for f in rest {
        entries = kron(&entries, &f.entries);
        label.extend_from_slice(&f.label);
    }
    Ok(Projector { entries, label })
}

/// U_θ = cos(θ/2)·I + i·sin(θ/2)·σ_z.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseUnitary {
    angle: f64,
    entries: CMatrix,
}

impl PhaseUnitary {
    /// Angle reduced to [0, 2π).
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// Heisenberg-picture action `U† M U`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        self.entries.adjoint() * m * &self.entries
    }

    /// Maps an equatorial projector at angle φ onto the one at φ+θ.
    pub fn conjugate_projector(&self, p: &Projector) -> Projector {
        let label = p
            .label
            .iter()
            .map(|f| match f {
                FactorLabel::Equator(phi) => FactorLabel::Equator(wrap_angle(phi + self.angle)),
                other => *other,
            })
            .collect();
        Projector {
            entries: hermitian_part(&self.conjugate(&p.entries)),
            label,
        }
    }
}

/// The matrix is built from the unreduced angle, so θ = 2π gives −I (a global
/// phase with the same conjugation action as the identity).
pub fn phase_rotation(theta: f64) -> Result<PhaseUnitary> {
    if !theta.is_finite() {
        return Err(TomographyError::invalid("phase angle must be finite"));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let entries = CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(c, s), ZERO, ZERO, Complex64::new(c, -s)],
    );
    Ok(PhaseUnitary {
        angle: wrap_angle(theta),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Fidelity, sampling, projection
// ---------------------------------------------------------------------------

/// Root fidelity `tr√(√a · b · √a)`, clamped to [0, 1].
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(TomographyError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let sa = psd_sqrt(a.matrix());
    let inner = &sa * b.matrix() * &sa;
    let (vals, _) = hermitian_eigen(&inner);
    let f: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

pub fn infidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    fidelity(a, b).map(|f| 1.0 - f)
}

/// G·G†/tr(G·G†) with G drawn entrywise from the standard complex normal law.
pub fn random_ginibre_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    assert!(dim >= 1, "state dimension must be positive");
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * FRAC_1_SQRT_2
    });
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix {
        entries: hermitian_part(&gg.unscale(tr)),
    }
}

/// Euclidean projection of `values` onto the unit simplex {x ≥ 0, Σx = 1}.
pub fn project_onto_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            threshold = t;
        }
    }
    values.iter().map(|&v| (v - threshold).max(0.0)).collect()
}

/// Nearest density matrix (Frobenius norm) to a Hermitian matrix, obtained by
/// projecting its spectrum onto the unit simplex.
pub fn project_spectrum_to_simplex(h: &CMatrix) -> Result<DensityMatrix> {
    if h.nrows() == 0 || !h.is_square() {
        return Err(TomographyError::invalid("projection needs a square non-empty matrix"));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(TomographyError::invalid("projection input has non-finite entries"));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = hermitian_defect(h);
    if defect > HERMITIAN_TOL * scale {
        return Err(TomographyError::invalid(format!(
            "projection input is not Hermitian (defect {defect:e})"
        )));
    }
    let (vals, vecs) = hermitian_eigen(h);
    let vals: Vec<f64> = vals.iter().copied().collect();
    let projected = project_onto_simplex(&vals);
    Ok(DensityMatrix {
        entries: from_spectrum(&projected, &vecs),
    })
}

/// Pauli-string basis for `qubits` qubits, excluding the identity string.
/// Elements are ordered with qubit 0 most significant and Paulis as (I, X, Y, Z).
pub fn pauli_basis(qubits: usize) -> Vec<CMatrix> {
    let singles = [identity(2), pauli_x(), pauli_y(), pauli_z()];
    let mut strings = vec![CMatrix::identity(1, 1)];
    for _ in 0..qubits {
        strings = strings
            .iter()
            .flat_map(|s| singles.iter().map(move |p| kron(s, p)))
            .collect();
    }
    strings.remove(0);
    strings
}

/// `true` if `phi` lies within `tol` of `target` on the circle.
pub fn angles_close(phi: f64, target: f64, tol: f64) -> bool {
    let d = wrap_angle(phi - target);
    d.min(TAU - d) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    mod approx_eq {
        use super::CMatrix;
        pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
            a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        }
    }

    fn half(m: CMatrix) -> CMatrix {
        m.scale(0.5)
    }

    #[test]
    fn phase_rotation_identity_and_full_turn() {
        let u0 = phase_rotation(0.0).unwrap();
        assert!(max_diff(u0.matrix(), &identity(2)) < 1e-15);
        let u = phase_rotation(TAU).unwrap();
        assert!(max_diff(u.matrix(), &(-identity(2))) < 1e-15);
        assert_eq!(u.angle(), 0.0);
        let m = equatorial_projector(0.7).unwrap();
        assert!(max_diff(&u.conjugate(m.matrix()), m.matrix()) < 1e-15);
    }

    #[test]
    fn phase_rotation_rejects_nan() {
        assert!(phase_rotation(f64::NAN).is_err());
        assert!(phase_rotation(f64::INFINITY).is_err());
    }

    #[test]
    fn conjugating_plus_by_half_turn_gives_minus() {
        let plus = half(identity(2) + pauli_x());
        let minus = half(identity(2) - pauli_x());
        let u = phase_rotation(PI).unwrap();
        assert!(max_diff(&u.conjugate(&plus), &minus) < 1e-15);
    }

    #[test]
    fn conjugation_shifts_equatorial_angle() {
        let p = equatorial_projector(0.4).unwrap();
        let u = phase_rotation(1.1).unwrap();
        let q = u.conjugate_projector(&p);
        let expected = equatorial_projector(1.5).unwrap();
        assert!(max_diff(q.matrix(), expected.matrix()) < 1e-14);
        assert_eq!(q.label(), expected.label());
    }

    #[test]
    fn equatorial_projector_examples() {
        let p0 = equatorial_projector(0.0).unwrap();
        assert!(max_diff(p0.matrix(), &half(identity(2) + pauli_x())) < 1e-15);
        let py = equatorial_projector(PI / 2.0).unwrap();
        assert!(max_diff(py.matrix(), &half(identity(2) + pauli_y())) < 1e-15);
        let a = equatorial_projector(1.234).unwrap();
        let b = equatorial_projector(1.234 + PI).unwrap();
        assert!(max_diff(&(a.matrix() + b.matrix()), &identity(2)) < 1e-15);
        assert!(max_diff(&(a.matrix() * a.matrix()), a.matrix()) < 1e-12);
        assert!(equatorial_projector(f64::NAN).is_err());
    }

    #[test]
    fn tensor_examples() {
        let uu = tensor_projectors(&[z_up(), z_up()]).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = ONE;
        assert!(max_diff(uu.matrix(), &expected) < 1e-15);

        let pairs = [(z_up(), z_down()), (equatorial_projector(0.3).unwrap(), equatorial_projector(0.3 + PI).unwrap())];
        let mut total = CMatrix::zeros(4, 4);
        for a in [&pairs[0].0, &pairs[0].1] {
            for b in [&pairs[1].0, &pairs[1].1] {
                total += tensor_projectors(&[a.clone(), b.clone()]).unwrap().matrix();
            }
        }
        assert!(max_diff(&total, &identity(4)) < 1e-14);

        let mixed = tensor_projectors(&[
            equatorial_projector(0.0).unwrap(),
            equatorial_projector(PI / 2.0).unwrap(),
        ])
        .unwrap();
        for z in mixed.matrix().iter() {
            assert!((z.norm() - 0.25).abs() < 1e-15);
        }
        assert!(max_diff(&(mixed.matrix() * mixed.matrix()), mixed.matrix()) < 1e-12);
        assert_eq!(mixed.axis_pattern(), vec![false, false]);
        assert!(tensor_projectors(&[]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let up = DensityMatrix::pure(&[ONE, ZERO]).unwrap();
        let down = DensityMatrix::pure(&[ZERO, ONE]).unwrap();
        assert!(fidelity(&up, &down).unwrap() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        let f = fidelity(&mixed, &up).unwrap();
        assert!((f - FRAC_1_SQRT_2).abs() < 1e-12);
        let f_rev = fidelity(&up, &mixed).unwrap();
        assert!((f_rev - FRAC_1_SQRT_2).abs() < 1e-7);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_ginibre_state(4, &mut rng);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity(&rho, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn ginibre_states_are_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 4, 8] {
            let x = random_ginibre_state(dim, &mut a);
            let y = random_ginibre_state(dim, &mut b);
            assert_eq!(x, y);
            x.validate().unwrap();
            assert!(x.min_eigenvalue() > 0.0);
            assert!((x.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ginibre_mean_is_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000;
        let mut acc = CMatrix::zeros(2, 2);
        for _ in 0..n {
            acc += random_ginibre_state(2, &mut rng).matrix();
        }
        let mean = acc.unscale(n as f64);
        assert!(max_diff(&mean, DensityMatrix::maximally_mixed(2).matrix()) < 0.02);
    }

    #[test]
    fn simplex_projection_examples() {
        let diag = |a: f64, b: f64| {
            CMatrix::from_row_slice(2, 2, &[Complex64::from(a), ZERO, ZERO, Complex64::from(b)])
        };
        let p = project_spectrum_to_simplex(&diag(2.0, 0.0)).unwrap();
        assert!(max_diff(p.matrix(), &diag(1.0, 0.0)) < 1e-14);
        let p = project_spectrum_to_simplex(&diag(0.6, 0.6)).unwrap();
        assert!(max_diff(p.matrix(), &diag(0.5, 0.5)) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_ginibre_state(4, &mut rng);
        let p = project_spectrum_to_simplex(rho.matrix()).unwrap();
        assert!(max_diff(p.matrix(), rho.matrix()) < 1e-12);

        let mut bad = diag(0.5, 0.5);
        bad[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(project_spectrum_to_simplex(&bad).is_err());
    }

    #[test]
    fn simplex_vector_projection() {
        assert_eq!(project_onto_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_onto_simplex(&[0.3, -0.2, 0.4, 0.1]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn hilbert_schmidt_conventions() {
        assert_eq!(hs_inner(&identity(2), &identity(2)), 2.0);
        assert_eq!(hs_inner(&pauli_x(), &pauli_y()), 0.0);
        assert_eq!(hs_norm_sqr(&pauli_z()), 2.0);
    }

    #[test]
    fn state_validation_rejects_bad_input() {
        let bad_trace = identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let neg = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::from(1.5), ZERO, ZERO, Complex64::from(-0.5)],
        );
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::new(identity(2).scale(0.5)).is_ok());
    }

    #[test]
    fn pauli_basis_is_orthogonal() {
        let basis = pauli_basis(2);
        assert_eq!(basis.len(), 15);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 4.0 } else { 0.0 };
                assert!((hs_inner(a, b) - expected).abs() < 1e-14);
            }
        }
    }
}
