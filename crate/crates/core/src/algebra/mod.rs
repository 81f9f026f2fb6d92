//! Twisted group algebras over a phase-space subgroup.
//!
//! An A-side element is a(λ) ↦ Σ a(λ)π(λ) over Λ; a B-side element is
//! b ↦ w·Σ b(μ)π(μ)* over Λ° with the orthogonal weight w = 1/s(Λ) kept apart
//! from the coefficients. `realize` maps both into dense operators so that
//! products and involutions can be checked against matrix arithmetic.

mod lattice;
mod neumann;

pub use lattice::LatticeElement;
pub use neumann::{
    neumann_inverse, neumann_inverse_around, BanachElement, NeumannResult, NeumannSummary,
};

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rational::{self, Rational};
use crate::timefreq::{inner, Domain, PhaseSubgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "B")]
    B,
}

#[derive(Clone, Debug)]
pub struct AlgebraElement {
    side: Side,
    support: PhaseSubgroup,
    /// Coefficient per member of `support`, in member order.
    coeffs: Vec<Complex64>,
    weight: Rational,
}

impl AlgebraElement {
    pub fn new(
        side: Side,
        support: PhaseSubgroup,
        coeffs: Vec<Complex64>,
        weight: Rational,
    ) -> Result<Self> {
        if coeffs.len() != support.len() {
            return Err(Error::invalid("one coefficient per support point expected"));
        }
        if weight <= Rational::zero() {
            return Err(Error::invalid("weight must be positive"));
        }
        Ok(AlgebraElement {
            side,
            support,
            coeffs,
            weight,
        })
    }

    pub fn zero(side: Side, support: PhaseSubgroup, weight: Rational) -> Self {
        let coeffs = vec![Complex64::zero(); support.len()];
        AlgebraElement {
            side,
            support,
            coeffs,
            weight,
        }
    }

    /// δ_χ with unit coefficient.
    pub fn delta(side: Side, support: PhaseSubgroup, p: usize, weight: Rational) -> Result<Self> {
        let mut e = Self::zero(side, support, weight);
        let s = e
            .support
            .slot(p)
            .ok_or_else(|| Error::invalid("point outside the support"))?;
        e.coeffs[s] = Complex64::one();
        Ok(e)
    }

    /// The element realizing the identity operator.
    pub fn identity(side: Side, support: PhaseSubgroup, weight: Rational) -> Self {
        let mut e = Self::zero(side, support, weight);
        e.coeffs[0] = Complex64::new(1.0 / e.weight_f64(), 0.0);
        e
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn support(&self) -> &PhaseSubgroup {
        &self.support
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.support.domain()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn weight(&self) -> Rational {
        self.weight
    }

    fn weight_f64(&self) -> f64 {
        match self.side {
            Side::A => 1.0,
            Side::B => rational::to_f64(self.weight),
        }
    }

    pub fn coeff(&self, p: usize) -> Complex64 {
        self.support
            .slot(p)
            .map_or(Complex64::zero(), |s| self.coeffs[s])
    }

    /// Operator-ℓ¹ norm: Σ|coeff| times the measure weight.
    pub fn norm1(&self) -> f64 {
        self.weight_f64() * self.coeffs.iter().map(|c| c.norm()).sum::<f64>()
    }

    /// tr(a) = coefficient at the origin.
    pub fn trace(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.side != other.side || self.support != other.support || self.weight != other.weight {
            return Err(Error::invalid("elements live in different algebras"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(AlgebraElement {
            coeffs,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(AlgebraElement {
            coeffs,
            ..self.clone()
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        AlgebraElement {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// Twisted convolution. A-side phase c(μ,ν); B-side phase conj(c(ν,μ)) and
    /// one factor of the weight.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let d = self.domain();
        let pts = self.support.points();
        let mut out = vec![Complex64::zero(); pts.len()];
        for (i, &mu) in pts.iter().enumerate() {
            let a = self.coeffs[i];
            if a == Complex64::zero() {
                continue;
            }
            for (j, &nu) in pts.iter().enumerate() {
                let b = other.coeffs[j];
                if b == Complex64::zero() {
                    continue;
                }
                let phase = match self.side {
                    Side::A => d.cocycle(mu, nu),
                    Side::B => d.cocycle(nu, mu).conj(),
                };
                let s = self
                    .support
                    .slot(d.phase_add(mu, nu))
                    .expect("support is a subgroup");
                out[s] += a * b * phase;
            }
        }
        if self.side == Side::B {
            let w = self.weight_f64();
            out.iter_mut().for_each(|c| *c *= w);
        }
        Ok(AlgebraElement {
            coeffs: out,
            ..self.clone()
        })
    }

    /// a*(μ) = conj(a(−μ))·c(μ,μ) on the A-side, conj(b(−μ))·conj(c(μ,μ)) on the B-side.
    pub fn involution(&self) -> Self {
        let d = self.domain();
        let coeffs = self
            .support
            .points()
            .iter()
            .map(|&mu| {
                let v = self.coeff(d.phase_neg(mu)).conj();
                match self.side {
                    Side::A => v * d.cocycle(mu, mu),
                    Side::B => v * d.cocycle(mu, mu).conj(),
                }
            })
            .collect();
        AlgebraElement {
            coeffs,
            ..self.clone()
        }
    }

    /// a·f = Σ a(λ)π(λ)f, or f·b = w Σ b(μ)π(μ)* f.
    pub fn act(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let d = self.domain();
        if f.len() != d.n() {
            return Err(Error::invalid(
                "vector does not live on the algebra's domain",
            ));
        }
        let mut out = linalg::zeros(d.n());
        for (&p, &c) in self.support.points().iter().zip(&self.coeffs) {
            if c == Complex64::zero() {
                continue;
            }
            let v = match self.side {
                Side::A => d.tf_shift_unchecked(p, f),
                Side::B => d.tf_shift_adjoint_unchecked(p, f),
            };
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        if self.side == Side::B {
            let w = self.weight_f64();
            out.iter_mut().for_each(|c| *c *= w);
        }
        Ok(out)
    }

    /// Dense matrix of the operator the element acts by.
    pub fn realize(&self) -> CMatrix {
        let d = self.domain();
        let n = d.n();
        let mut m = CMatrix::zeros(n, n);
        let w = self.weight_f64();
        for (&p, &c) in self.support.points().iter().zip(&self.coeffs) {
            if c == Complex64::zero() {
                continue;
            }
            // π(χ) e_s = ω(s + x) e_{s+x}; π(χ)* = c(χ,χ) π(−χ).
            let (q, scale) = match self.side {
                Side::A => (p, c),
                Side::B => (d.phase_neg(p), c * d.cocycle(p, p) * w),
            };
            let (x, om) = d.split(q);
            for s in 0..n {
                let t = d.time_add(s, x);
                m[(t, s)] += scale * d.root(d.pairing(om, t));
            }
        }
        m
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.domain();
        let coeffs: Vec<serde_json::Value> = self
            .support
            .points()
            .iter()
            .zip(&self.coeffs)
            .map(|(&p, c)| {
                let (x, w) = d.point_labels(p);
                let mut row: Vec<serde_json::Value> =
                    x.iter().chain(w.iter()).map(|&v| v.into()).collect();
                row.push(c.re.into());
                row.push(c.im.into());
                serde_json::Value::Array(row)
            })
            .collect();
        serde_json::json!({
            "side": self.side,
            "ambient": d.ambient().orders(),
            "weight": { "num": self.weight.numer(), "den": self.weight.denom() },
            "coeffs": coeffs,
        })
    }
}

impl BanachElement for AlgebraElement {
    fn one_like(&self) -> Self {
        Self::identity(self.side, self.support.clone(), self.weight)
    }
    fn scalar_part(&self) -> Complex64 {
        self.coeffs[0] * self.weight_f64()
    }
    fn scale(&self, s: Complex64) -> Self {
        AlgebraElement::scale(self, s)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        AlgebraElement::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        AlgebraElement::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        AlgebraElement::mul(self, other)
    }
    fn norm1(&self) -> f64 {
        AlgebraElement::norm1(self)
    }
}

fn check_pair(f: &[Complex64], g: &[Complex64], lambda: &PhaseSubgroup) -> Result<()> {
    let n = lambda.domain().n();
    if f.len() != n || g.len() != n {
        return Err(Error::invalid("vectors must live on the lattice domain"));
    }
    Ok(())
}

/// ⟨f,g⟩_Λ = Σ_λ ⟨f, π(λ)g⟩ π(λ).
pub fn inner_left(
    f: &[Complex64],
    g: &[Complex64],
    lambda: &PhaseSubgroup,
) -> Result<AlgebraElement> {
    check_pair(f, g, lambda)?;
    let d = lambda.domain();
    let coeffs = lambda
        .points()
        .iter()
        .map(|&p| inner(f, &d.tf_shift_unchecked(p, g)))
        .collect();
    AlgebraElement::new(Side::A, lambda.clone(), coeffs, Rational::one())
}

/// ⟨f,g⟩_{Λ°} = (1/s(Λ)) Σ_{λ°} ⟨g, π(λ°)* f⟩ π(λ°)*, with Λ° computed from Λ.
pub fn inner_right(
    f: &[Complex64],
    g: &[Complex64],
    lambda: &PhaseSubgroup,
) -> Result<AlgebraElement> {
    inner_right_on(f, g, &lambda.adjoint(), lambda.covolume().recip())
}

/// `inner_right` with Λ° and the weight supplied by the caller.
pub fn inner_right_on(
    f: &[Complex64],
    g: &[Complex64],
    adjoint: &PhaseSubgroup,
    weight: Rational,
) -> Result<AlgebraElement> {
    check_pair(f, g, adjoint)?;
    let d = adjoint.domain();
    let coeffs = adjoint
        .points()
        .iter()
        .map(|&p| inner(g, &d.tf_shift_adjoint_unchecked(p, f)))
        .collect();
    AlgebraElement::new(Side::B, adjoint.clone(), coeffs, weight)
}

/// n×n matrix over one algebra, row-major.
#[derive(Clone, Debug)]
pub struct MatrixElement {
    n: usize,
    entries: Vec<AlgebraElement>,
}

impl MatrixElement {
    pub fn new(n: usize, entries: Vec<AlgebraElement>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::invalid("a matrix element needs n² entries, n ≥ 1"));
        }
        for e in &entries[1..] {
            entries[0].compatible(e)?;
        }
        Ok(MatrixElement { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> Side {
        self.entries[0].side
    }

    pub fn entry(&self, j: usize, k: usize) -> &AlgebraElement {
        &self.entries[j * self.n + k]
    }

    pub fn entries(&self) -> &[AlgebraElement] {
        &self.entries
    }

    pub fn norm1(&self) -> f64 {
        self.entries.iter().map(|e| e.norm1()).sum()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::invalid("matrix sizes differ"));
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = self.entry(j, 0).mul(other.entry(0, k))?;
                for l in 1..n {
                    acc = acc.add(&self.entry(j, l).mul(other.entry(l, k))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(MatrixElement { n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::invalid("matrix sizes differ"));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(MatrixElement { n: self.n, entries })
    }

    /// Conjugate transpose with entrywise involution.
    pub fn involution(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n)
            .map(|i| self.entry(i % n, i / n).involution())
            .collect();
        MatrixElement { n, entries }
    }

    /// Σ_j tr(a_jj) on the A-side, (1/n) Σ_j tr(b_jj) on the B-side.
    pub fn trace(&self) -> Complex64 {
        let s: Complex64 = (0..self.n).map(|j| self.entry(j, j).trace()).sum();
        match self.side() {
            Side::A => s,
            Side::B => s / self.n as f64,
        }
    }

    /// Applies the matrix to a tuple: (M f)_j = Σ_k m_jk · f_k.
    pub fn act(&self, fs: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
        if fs.len() != self.n {
            return Err(Error::invalid("tuple length differs from matrix size"));
        }
        let n = self.n;
        (0..n)
            .map(|j| {
                let mut acc = linalg::zeros(fs[0].len());
                for k in 0..n {
                    for (a, v) in acc.iter_mut().zip(self.entry(j, k).act(&fs[k])?) {
                        *a += v;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Block realization on (ℂ^N)^n.
    pub fn realize(&self) -> CMatrix {
        let n = self.n;
        let dim = self.entries[0].domain().n();
        let mut m = CMatrix::zeros(n * dim, n * dim);
        for j in 0..n {
            for k in 0..n {
                m.view_mut((j * dim, k * dim), (dim, dim))
                    .copy_from(&self.entry(j, k).realize());
            }
        }
        m
    }
}

fn check_tuples(fs: &[Vec<Complex64>], gs: &[Vec<Complex64>]) -> Result<()> {
    if fs.is_empty() || fs.len() != gs.len() {
        return Err(Error::invalid(
            "tuples must be nonempty and of equal length",
        ));
    }
    Ok(())
}

/// [⟨f_j, g_k⟩_Λ]_{j,k}.
pub fn matrix_inner_left(
    fs: &[Vec<Complex64>],
    gs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<MatrixElement> {
    check_tuples(fs, gs)?;
    let n = fs.len();
    let mut entries = Vec::with_capacity(n * n);
    for f in fs {
        for g in gs {
            entries.push(inner_left(f, g, lambda)?);
        }
    }
    MatrixElement::new(n, entries)
}

/// diag(Σ_j ⟨f_j, g_j⟩_{Λ°}).
pub fn matrix_inner_right(
    fs: &[Vec<Complex64>],
    gs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<MatrixElement> {
    check_tuples(fs, gs)?;
    let adjoint = lambda.adjoint();
    let weight = lambda.covolume().recip();
    let mut sum = inner_right_on(&fs[0], &gs[0], &adjoint, weight)?;
    for (f, g) in fs.iter().zip(gs).skip(1) {
        sum = sum.add(&inner_right_on(f, g, &adjoint, weight)?)?;
    }
    let n = fs.len();
    let zero = AlgebraElement::zero(Side::B, adjoint, weight);
    let entries = (0..n * n)
        .map(|i| {
            if i % (n + 1) == 0 {
                sum.clone()
            } else {
                zero.clone()
            }
        })
        .collect();
    MatrixElement::new(n, entries)
}

/// ‖(g_j)‖_Λ = ‖[⟨g_j,g_k⟩_Λ]‖_op^{1/2}.
pub fn module_norm(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<f64> {
    let m = matrix_inner_left(gs, gs, lambda)?;
    Ok(linalg::psd_norm(&m.realize()).sqrt())
}

/// The same norm computed from the B-side realization.
pub fn module_norm_right(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<f64> {
    let m = matrix_inner_right(gs, gs, lambda)?;
    Ok(linalg::psd_norm(&m.entry(0, 0).realize()).sqrt())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub idempotent_residual: f64,
    pub selfadjoint_residual: f64,
    pub is_projection: bool,
}

/// ‖p·p − p‖₁ and ‖p* − p‖₁.
pub fn is_projection(p: &MatrixElement, tol: f64) -> Result<ProjectionReport> {
    let idem = p.mul(p)?.sub(p)?.norm1();
    let sa = p.involution().sub(p)?.norm1();
    Ok(ProjectionReport {
        idempotent_residual: idem,
        selfadjoint_residual: sa,
        is_projection: idem < tol && sa < tol,
    })
}

#[cfg(test)]
mod tests;
