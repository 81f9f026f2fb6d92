use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The operations a Neumann series needs from an ℓ¹ algebra.
pub trait BanachElement: Clone {
    /// The element realizing the identity.
    fn one_like(&self) -> Self;
    /// Coefficient of the identity operator in the realization.
    fn scalar_part(&self) -> Complex64;
    fn scale(&self, s: Complex64) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    /// Operator-ℓ¹ norm, including any recorded truncation tail.
    fn norm1(&self) -> f64;
}

#[derive(Clone, Debug)]
pub struct NeumannResult<E> {
    pub inverse: E,
    pub iterations: usize,
    /// ‖e‖₁ for b = σ(1 − e).
    pub e_norm: f64,
    /// ‖b·inverse − 1‖₁.
    pub residual: f64,
    pub sigma: Complex64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NeumannSummary {
    pub iterations: usize,
    pub e_norm: f64,
    pub residual: f64,
}

impl<E> NeumannResult<E> {
    pub fn summary(&self) -> NeumannSummary {
        NeumannSummary {
            iterations: self.iterations,
            e_norm: self.e_norm,
            residual: self.residual,
        }
    }
}

/// Inverts b = σ(1 − e) with σ its own scalar part.
pub fn neumann_inverse<E: BanachElement>(
    b: &E,
    tol: f64,
    max_iter: usize,
) -> Result<NeumannResult<E>> {
    neumann_inverse_around(b, b.scalar_part(), tol, max_iter)
}

/// Inverts b = σ(1 − e) for a caller-chosen σ; fails when ‖e‖₁ ≥ 1.
pub fn neumann_inverse_around<E: BanachElement>(
    b: &E,
    sigma: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<NeumannResult<E>> {
    if sigma.norm() == 0.0 || !sigma.is_finite() {
        return Err(Error::NotDiagonallyDominant {
            norm: f64::INFINITY,
        });
    }
    let one = b.one_like();
    let e = one.sub(&b.scale(sigma.inv()))?;
    let e_norm = e.norm1();
    if !(e_norm < 1.0) {
        return Err(Error::NotDiagonallyDominant { norm: e_norm });
    }
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut iterations = 0;
    let mut term_norm = 1.0;
    // ‖Σ_{j>k} e^j‖ ≤ ‖e^k‖·‖e‖/(1 − ‖e‖); stop once that is below tol·|σ|.
    while iterations < max_iter && term_norm * e_norm / (1.0 - e_norm) > tol * 0.5 {
        term = term.mul(&e)?;
        sum = sum.add(&term)?;
        term_norm = term.norm1();
        iterations += 1;
    }
    let inverse = sum.scale(sigma.inv());
    let residual = b.mul(&inverse)?.sub(&one)?.norm1();
    Ok(NeumannResult {
        inverse,
        iterations,
        e_norm,
        residual,
        sigma,
    })
}
