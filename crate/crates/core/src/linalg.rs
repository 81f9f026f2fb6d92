//! Dense linear algebra on ℂⁿ: Hermitian spectra, power iteration, conjugate
//! gradients and least squares, on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Above this dimension operator norms use power iteration instead of a full
/// eigendecomposition.
pub const DENSE_EIGEN_LIMIT: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn zeros(n: usize) -> Vec<Complex64> {
    vec![ZERO; n]
}

/// Vector with independent standard complex Gaussian entries.
pub fn random_vector(rng: &mut impl rand::Rng, n: usize) -> Vec<Complex64> {
    use rand_distr::{Distribution, StandardNormal};
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Builds the matrix whose j-th column is `apply(e_j)`.
pub fn matrix_from_fn(n: usize, mut apply: impl FnMut(&[Complex64]) -> Vec<Complex64>) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    let mut e = zeros(n);
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = apply(&e);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = ZERO;
    }
    m
}

pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Largest |entry| of `a - b`.
pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_entry_diff(m, &m.adjoint())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Largest eigenvalue of a PSD operator given only by its action.
///
/// The seed is the all-ones vector plus a small deterministic ramp, so that it
/// is not orthogonal to the top eigenspace of the common symmetric examples.
pub fn power_iteration(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    tol: f64,
    max_iter: usize,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            Complex64::new(
                1.0 + 1e-3 * (i as f64 / n as f64),
                1e-3 * ((i * 7 % 13) as f64 / 13.0),
            )
        })
        .collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = apply(&v);
        let nw = norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw;
        v = w.into_iter().map(|z| z / nw).collect();
        if (next - lambda).abs() <= tol * next.max(1e-300) {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Operator norm of a PSD matrix: full spectrum up to `DENSE_EIGEN_LIMIT`,
/// power iteration beyond.
pub fn psd_norm(m: &CMatrix) -> f64 {
    let n = m.nrows();
    if n <= DENSE_EIGEN_LIMIT {
        hermitian_eigenvalues(m)
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
    } else {
        power_iteration(n, |v| mat_vec(m, v), 1e-10, 20_000)
    }
}

/// Solves S x = b for Hermitian positive definite S by conjugate gradients.
/// Returns the solution and the final relative residual.
pub fn conjugate_gradient(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> (Vec<Complex64>, f64) {
    let n = b.len();
    let dot = |a: &[Complex64], c: &[Complex64]| {
        a.iter()
            .zip(c)
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
    };
    let bnorm = dot(b, b).re.sqrt();
    if bnorm == 0.0 {
        return (zeros(n), 0.0);
    }
    let mut x = zeros(n);
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * bnorm {
            break;
        }
        let sp = apply(&p);
        let alpha = rr / dot(&p, &sp).re;
        for i in 0..n {
            x[i] += p[i] * alpha;
            r[i] -= sp[i] * alpha;
        }
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
        rr = rr_new;
    }
    // Report the true residual rather than the recursively updated one.
    let sx = apply(&x);
    let res = sx
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / bnorm;
    (x, res)
}

/// Direct LU solve.
pub fn solve(m: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    m.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
        .ok_or_else(|| Error::NotAFrame("singular system".into()))
}

/// Relative distance from `target` to the span of `columns`, by SVD least squares.
pub fn span_residual(columns: &[Vec<Complex64>], target: &[Complex64]) -> f64 {
    let n = target.len();
    let tnorm = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if tnorm == 0.0 {
        return 0.0;
    }
    if columns.is_empty() {
        return 1.0;
    }
    let a = CMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    let b = DVector::from_column_slice(target);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let coeffs = match svd.solve(&b, smax * 1e-12) {
        Ok(c) => c,
        Err(_) => return f64::NAN,
    };
    let r = a * coeffs - b;
    r.norm() / tnorm
}
