//! Reference implementations shared by the integration and acceptance tests.
//! Nothing here calls into the library's numerical kernels.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use retrotomo::linalg::CMatrix;
use retrotomo::ml::CostContext;

/// Cyclic Jacobi eigensolver for a real symmetric matrix. Returns the
/// eigenvalues and the eigenvectors as columns.
pub fn jacobi_eigh(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Real 2n×2n embedding [[A, −B], [B, A]] of H = A + iB.
pub fn real_embedding(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Nearest density matrix to Hermitian `h`: spectral decomposition by Jacobi
/// on the real embedding, simplex threshold by bisection.
pub fn oracle_simplex_projection(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let (vals, vecs) = jacobi_eigh(&real_embedding(h));
    // every eigenvalue of h appears twice in the embedding
    let excess = |tau: f64| vals.iter().map(|&l| (l - tau).max(0.0)).sum::<f64>() - 2.0;
    let mut lo = vals.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0;
    let mut hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (k, &l) in vals.iter().enumerate() {
        let w = (l - tau).max(0.0);
        if w > 0.0 {
            let col = vecs.column(k);
            r += col * col.transpose() * w;
        }
    }
    CMatrix::from_fn(n, n, |i, j| Complex64::new(r[(i, j)], r[(i + n, j)]))
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    (&g + g.adjoint()).scale(0.5 * scale)
}

/// −Σ n_j log tr(O_j M) evaluated directly on an arbitrary matrix M.
pub fn oracle_cost(ctx: &CostContext, m: &CMatrix) -> f64 {
    ctx.operators()
        .iter()
        .zip(ctx.counts())
        .map(|(op, &n)| -n * (op.matrix() * m).trace().re.ln())
        .sum()
}

/// Orthonormal basis of the real space of d×d Hermitian matrices.
pub fn hermitian_basis(dim: usize) -> Vec<CMatrix> {
    let mut basis = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in 0..dim {
            let mut e = CMatrix::zeros(dim, dim);
            if i == j {
                e[(i, i)] = Complex64::new(1.0, 0.0);
            } else if i < j {
                e[(i, j)] = Complex64::new(r, 0.0);
                e[(j, i)] = Complex64::new(r, 0.0);
            } else {
                e[(i, j)] = Complex64::new(0.0, r);
                e[(j, i)] = Complex64::new(0.0, -r);
            }
            basis.push(e);
        }
    }
    basis
}

/// Central-difference gradient of [`oracle_cost`] with respect to the real
/// Hilbert-Schmidt inner product.
pub fn fd_gradient(ctx: &CostContext, m: &CMatrix, step: f64) -> CMatrix {
    let dim = m.nrows();
    let mut g = CMatrix::zeros(dim, dim);
    for e in hermitian_basis(dim) {
        let plus = oracle_cost(ctx, &(m + e.scale(step)));
        let minus = oracle_cost(ctx, &(m - e.scale(step)));
        g += e.scale((plus - minus) / (2.0 * step));
    }
    g
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Paired bootstrap of median(a) − median(b) over resampled trial indices.
/// Returns the point estimate, the one-sided 95% lower bound and the
/// bootstrap standard error.
pub fn paired_median_gap<R: Rng + ?Sized>(a: &[f64], b: &[f64], reps: usize, rng: &mut R) -> (f64, f64, f64) {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let point = median(a) - median(b);
    let mut gaps: Vec<f64> = (0..reps)
        .map(|_| {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let ra: Vec<f64> = idx.iter().map(|&i| a[i]).collect();
            let rb: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
            median(&ra) - median(&rb)
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    let mean = gaps.iter().sum::<f64>() / reps as f64;
    let se = (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    (point, gaps[(0.05 * reps as f64) as usize], se)
}
