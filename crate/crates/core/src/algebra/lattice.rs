use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::neumann::BanachElement;
use crate::error::{Error, Result};
use crate::timefreq::LatticeR2;

/// B-side element over a lattice Λ° ⊂ ℝ², truncated to the box
/// |m₁| ≤ r₁, |m₂| ≤ r₂ of lattice coordinates.
///
/// `tail` bounds the ℓ¹ mass (without the weight) of the coefficients that the
/// truncation dropped, so `norm1` is an upper bound for the untruncated element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeElement {
    pub lattice: LatticeR2,
    pub radius: [i64; 2],
    pub coeffs: Vec<Complex64>,
    pub weight: f64,
    pub tail: f64,
}

impl LatticeElement {
    pub fn zero(lattice: LatticeR2, radius: [i64; 2], weight: f64) -> Self {
        let len = ((2 * radius[0] + 1) * (2 * radius[1] + 1)) as usize;
        LatticeElement {
            lattice,
            radius,
            coeffs: vec![Complex64::zero(); len],
            weight,
            tail: 0.0,
        }
    }

    pub fn identity(lattice: LatticeR2, radius: [i64; 2], weight: f64) -> Self {
        let mut e = Self::zero(lattice, radius, weight);
        e.set(0, 0, Complex64::new(1.0 / weight, 0.0));
        e
    }

    pub fn index(&self, m1: i64, m2: i64) -> Option<usize> {
        let [r1, r2] = self.radius;
        if m1.abs() > r1 || m2.abs() > r2 {
            return None;
        }
        Some(((m1 + r1) * (2 * r2 + 1) + (m2 + r2)) as usize)
    }

    pub fn coords(&self, i: usize) -> (i64, i64) {
        let w = 2 * self.radius[1] + 1;
        (i as i64 / w - self.radius[0], i as i64 % w - self.radius[1])
    }

    pub fn get(&self, m1: i64, m2: i64) -> Complex64 {
        self.index(m1, m2)
            .map_or(Complex64::zero(), |i| self.coeffs[i])
    }

    pub fn set(&mut self, m1: i64, m2: i64, v: Complex64) {
        let i = self.index(m1, m2).expect("inside the box");
        self.coeffs[i] = v;
    }

    /// Phase-space point of the lattice coordinates (m₁, m₂).
    pub fn point(&self, i: usize) -> [f64; 2] {
        let (m1, m2) = self.coords(i);
        self.lattice.point(m1, m2)
    }

    pub fn truncated_norm1(&self) -> f64 {
        self.weight * self.coeffs.iter().map(|c| c.norm()).sum::<f64>()
    }

    pub fn tail_norm1(&self) -> f64 {
        self.weight * self.tail
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice
            || self.radius != other.radius
            || self.weight != other.weight
        {
            return Err(Error::invalid(
                "lattice elements over different boxes or lattices",
            ));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(LatticeElement {
            coeffs,
            tail: self.tail + other.tail,
            ..self.clone()
        })
    }

    /// π(μ)*π(ν)* = e^{2πi μ_ω ν_x} π(μ+ν)*; the product is cut back to the box.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.lattice, self.radius, self.weight);
        let mut dropped = 0.0;
        let nz_a: Vec<usize> = (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != Complex64::zero())
            .collect();
        let nz_b: Vec<usize> = (0..other.coeffs.len())
            .filter(|&i| other.coeffs[i] != Complex64::zero())
            .collect();
        for &i in &nz_a {
            let (a1, a2) = self.coords(i);
            let mu = self.point(i);
            let ca = self.coeffs[i] * self.weight;
            for &j in &nz_b {
                let (b1, b2) = other.coords(j);
                let nu = other.point(j);
                let v = ca
                    * other.coeffs[j]
                    * Complex64::from_polar(1.0, std::f64::consts::TAU * mu[1] * nu[0]);
                match out.index(a1 + b1, a2 + b2) {
                    Some(k) => out.coeffs[k] += v,
                    None => dropped += v.norm(),
                }
            }
        }
        // Cross terms with the recorded tails, in operator-ℓ¹ units, converted back.
        let (n1, e1) = (self.truncated_norm1(), self.tail_norm1());
        let (n2, e2) = (other.truncated_norm1(), other.tail_norm1());
        out.tail = dropped + (n1 * e2 + e1 * n2 + e1 * e2) / self.weight;
        Ok(out)
    }

    /// b*(μ) = conj(b(−μ)) e^{2πi μ_ω μ_x}.
    pub fn involution(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.coeffs.len() {
            let (m1, m2) = self.coords(i);
            let p = self.point(i);
            out.coeffs[i] = self.get(-m1, -m2).conj()
                * Complex64::from_polar(1.0, std::f64::consts::TAU * p[0] * p[1]);
        }
        out
    }

    /// The same weighted coefficients w·c(m) on another lattice with another
    /// weight, i.e. the same series in the generators U, V of the torus.
    pub fn transport(&self, lattice: LatticeR2, weight: f64) -> Self {
        let f = self.weight / weight;
        LatticeElement {
            lattice,
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
            weight,
            tail: self.tail * f,
        }
    }

    /// Largest coefficient magnitude away from the origin, relative to the origin.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let c0 = self.get(0, 0).norm();
        let off: f64 = self.coeffs.iter().map(|c| c.norm()).sum::<f64>() - c0;
        (off + self.tail) / c0
    }
}

impl BanachElement for LatticeElement {
    fn one_like(&self) -> Self {
        Self::identity(self.lattice, self.radius, self.weight)
    }
    fn scalar_part(&self) -> Complex64 {
        self.get(0, 0) * self.weight
    }
    fn scale(&self, s: Complex64) -> Self {
        LatticeElement {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            tail: self.tail * s.norm(),
            ..self.clone()
        }
    }
    fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        LatticeElement::mul(self, other)
    }
    fn norm1(&self) -> f64 {
        self.truncated_norm1() + self.tail_norm1()
    }
}
