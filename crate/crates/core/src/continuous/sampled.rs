use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::window::{atoms_support, Prim, Window};
use crate::error::{Error, Result};

/// Default ℓ¹ tail tolerance for restrictions.
pub const EPS_TAIL: f64 = 1e-12;
/// Largest number of samples a restriction may produce.
pub const MAX_SAMPLES: usize = 1 << 24;

/// A finitely supported sequence on γℤ: coeffs[i] sits at γ·(offset + i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSequence {
    pub gamma: f64,
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
    /// Upper bound for the ℓ¹ mass outside the stored range.
    pub tail_bound: f64,
}

impl SampledSequence {
    pub fn new(gamma: f64, offset: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("sampling step must be positive"));
        }
        Ok(SampledSequence {
            gamma,
            offset,
            coeffs,
            tail_bound: 0.0,
        })
    }

    /// Value at index k, i.e. at the point γk.
    pub fn get(&self, k: i64) -> Complex64 {
        let i = k - self.offset;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn indices(&self) -> std::ops::Range<i64> {
        self.offset..self.offset + self.coeffs.len() as i64
    }

    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SampledSequence {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            tail_bound: self.tail_bound * c.norm(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.gamma != other.gamma {
            return Err(Error::invalid("sequences on different grids"));
        }
        if self.coeffs.is_empty() {
            return Ok(other.clone());
        }
        if other.coeffs.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.offset.min(other.offset);
        let hi = self.indices().end.max(other.indices().end);
        let coeffs = (lo..hi).map(|k| self.get(k) + other.get(k)).collect();
        Ok(SampledSequence {
            gamma: self.gamma,
            offset: lo,
            coeffs,
            tail_bound: self.tail_bound + other.tail_bound,
        })
    }

    /// v(t) = Σ_k s(γ(t − kd)), t = 0..d−1.
    pub fn periodize(&self, d: usize) -> Result<Vec<Complex64>> {
        if d == 0 {
            return Err(Error::invalid("period must be positive"));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(self.offset + i as i64).rem_euclid(d as i64) as usize] += c;
        }
        Ok(v)
    }
}

/// Bound for Σ |c| e^{−π(t−x)²/w²} over grid points of step γ with |t − x| ≥ r.
pub fn gaussian_tail_bound(c: f64, width: f64, gamma: f64, r: f64) -> f64 {
    let w2 = width * width;
    2.0 * c * (-PI * r * r / w2).exp() / (1.0 - (-2.0 * PI * r * gamma / w2).exp())
}

/// Samples w on the grid points of γℤ inside [lo, hi], with the certified ℓ¹
/// mass of the Gaussian parts that fall outside.
pub fn restrict_within(w: &Window, gamma: f64, lo: f64, hi: f64) -> Result<SampledSequence> {
    let k0 = (lo / gamma).ceil() as i64;
    let k1 = (hi / gamma).floor() as i64;
    let count = (k1 - k0 + 1).max(0) as usize;
    if count > MAX_SAMPLES {
        return Err(Error::invalid(format!(
            "restriction would need {count} samples"
        )));
    }
    let atoms = w.atoms();
    let coeffs = (0..count)
        .map(|i| super::window::eval_atoms(&atoms, gamma * (k0 + i as i64) as f64))
        .collect();
    let mut tail = 0.0;
    for a in &atoms {
        match (&a.prim, a.support()) {
            (Prim::Gaussian { width }, _) => {
                let left = a.shift - gamma * (k0 - 1) as f64;
                let right = gamma * (k1 + 1) as f64 - a.shift;
                // One-sided halves of the symmetric bound.
                for r in [left, right] {
                    tail += if r > 0.0 {
                        0.5 * gaussian_tail_bound(a.coeff.norm(), *width, gamma, r)
                    } else {
                        f64::INFINITY
                    };
                }
            }
            (_, Some((s0, s1))) => {
                if s0 < gamma * (k0 - 1) as f64 || s1 > gamma * (k1 + 1) as f64 {
                    return Err(Error::invalid("window support exceeds the sampling range"));
                }
            }
            (_, None) => unreachable!("only Gaussians lack compact support"),
        }
    }
    let mut s = SampledSequence::new(gamma, k0, coeffs)?;
    s.tail_bound = tail;
    Ok(s)
}

/// R_{γℤ} w, truncated where the certified ℓ¹ tail drops below `eps_tail`.
pub fn restrict(w: &Window, gamma: f64, eps_tail: f64) -> Result<SampledSequence> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("sampling step must be positive"));
    }
    let atoms = w.atoms();
    if let Some((lo, hi)) = atoms_support(&atoms) {
        return restrict_within(w, gamma, lo, hi);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let budget = eps_tail / atoms.len() as f64;
    for a in &atoms {
        match (&a.prim, a.support()) {
            (Prim::Gaussian { width }, _) => {
                let c = a.coeff.norm();
                let mut r = width * ((2.0 * c / budget).max(1.0).ln() / PI).sqrt() + gamma;
                while gaussian_tail_bound(c, *width, gamma, r) > budget {
                    r += gamma;
                }
                lo = lo.min(a.shift - r);
                hi = hi.max(a.shift + r);
            }
            (_, Some((s0, s1))) => {
                lo = lo.min(s0);
                hi = hi.max(s1);
            }
            (_, None) => unreachable!(),
        }
    }
    let s = restrict_within(w, gamma, lo, hi)?;
    if s.tail_bound > eps_tail {
        return Err(Error::Truncation {
            tail: s.tail_bound,
            tol: eps_tail,
        });
    }
    Ok(s)
}
