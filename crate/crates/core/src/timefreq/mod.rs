//! Phase space, cocycles, time-frequency shifts, short-time Fourier transforms
//! and adjoint subgroups.
//!
//! Conventions: π(x,ω) = E_ω T_x, so (π(x,ω)f)(t) = ω(t) f(t − x);
//! c(χ₁,χ₂) = conj(ω₂(x₁)); c_s(χ₁,χ₂) = conj(ω₂(x₁)) ω₁(x₂).

mod domain;
mod lattice;
mod phase;

pub use domain::{inner, max_abs_diff, norm2, Domain, DomainKind};
pub use lattice::{canonical_basis, lattice_adjoint_r2, same_lattice, symplectic_form, LatticeR2};
pub use phase::{stft, PhaseSubgroup};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lca::{self, Element, FiniteAbelianGroup, Measure, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Element,
    pub omega: Element,
}

impl PhasePoint {
    pub fn new(x: Element, omega: Element) -> Self {
        PhasePoint { x, omega }
    }

    fn check(&self, g: &FiniteAbelianGroup) -> Result<()> {
        g.check(&self.x)?;
        g.check(&self.omega)
    }

    pub fn add(&self, g: &FiniteAbelianGroup, other: &PhasePoint) -> PhasePoint {
        PhasePoint {
            x: g.add(&self.x, &other.x),
            omega: g.add(&self.omega, &other.omega),
        }
    }

    pub fn neg(&self, g: &FiniteAbelianGroup) -> PhasePoint {
        PhasePoint {
            x: g.neg(&self.x),
            omega: g.neg(&self.omega),
        }
    }

    /// Index in the phase space G×G (lexicographic in (x, ω)).
    pub fn index(&self, g: &FiniteAbelianGroup) -> usize {
        g.index_of(&self.x) * g.cardinality() + g.index_of(&self.omega)
    }
}

/// c(χ₁,χ₂) = conj(ω₂(x₁)).
pub fn cocycle(g: &FiniteAbelianGroup, a: &PhasePoint, b: &PhasePoint) -> Result<Complex64> {
    a.check(g)?;
    b.check(g)?;
    Ok(g.character(&b.omega, &a.x)?.conj())
}

/// c_s(χ₁,χ₂) = c(χ₁,χ₂)·conj(c(χ₂,χ₁)).
pub fn symplectic_cocycle(
    g: &FiniteAbelianGroup,
    a: &PhasePoint,
    b: &PhasePoint,
) -> Result<Complex64> {
    Ok(cocycle(g, a, b)? * cocycle(g, b, a)?.conj())
}

/// π(χ) applied to f indexed by the lexicographic enumeration of G.
pub fn tf_shift(
    g: &FiniteAbelianGroup,
    chi: &PhasePoint,
    f: &[Complex64],
) -> Result<Vec<Complex64>> {
    chi.check(g)?;
    if f.len() != g.cardinality() {
        return Err(Error::invalid("vector length differs from |G|"));
    }
    Ok((0..g.cardinality())
        .map(|t| {
            let te = g.element(t);
            g.character(&chi.omega, &te).expect("valid element")
                * f[g.index_of(&g.sub(&te, &chi.x))]
        })
        .collect())
}

/// π(χ)* = c(χ,χ) π(−χ).
pub fn tf_shift_adjoint(
    g: &FiniteAbelianGroup,
    chi: &PhasePoint,
    f: &[Complex64],
) -> Result<Vec<Complex64>> {
    let c = cocycle(g, chi, chi)?;
    Ok(tf_shift(g, &chi.neg(g), f)?
        .into_iter()
        .map(|v| v * c)
        .collect())
}

/// Λ° as a subgroup of G×Ĝ, carrying the orthogonal measure with weight 1/s(Λ).
pub fn adjoint_subgroup(g: &FiniteAbelianGroup, lambda: &Subgroup) -> Result<Subgroup> {
    let domain = Domain::full(g);
    let l = PhaseSubgroup::from_subgroup(&domain, lambda)?;
    let adj = l.adjoint();
    let members = adj.points().to_vec();
    let s = lca::covolume(g, lambda)?;
    Ok(lca::subgroup_from_members(&g.phase_space(), members)?
        .with_measure(Measure::weighted(s.recip())))
}

/// STFT samples over Λ as (λ, value) pairs in canonical order.
pub fn stft_map(
    g: &FiniteAbelianGroup,
    f: &[Complex64],
    window: &[Complex64],
    lambda: &Subgroup,
) -> Result<Vec<(PhasePoint, Complex64)>> {
    let domain = Domain::full(g);
    let l = PhaseSubgroup::from_subgroup(&domain, lambda)?;
    let values = stft(f, window, &l)?;
    Ok(l.labels()
        .into_iter()
        .map(|(x, w)| PhasePoint::new(x, w))
        .zip(values)
        .collect())
}
