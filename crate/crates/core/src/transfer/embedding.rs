use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lca::{FiniteAbelianGroup, Subgroup};
use crate::linalg;
use crate::timefreq::{max_abs_diff, Domain, DomainKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingKind {
    /// H×Ĥ → G×Ĝ, (x, ω) ↦ (x, φ(ω)) with φ(ω) ∈ K_{H^⊥}.
    Phi,
    /// (G/H)×H^⊥ → G×Ĝ, (k+H, γ) ↦ (k, γ) with k ∈ K_H.
    Psi,
}

/// Φ or Ψ, realised on the index tables of the two domains.
#[derive(Clone, Debug)]
pub struct EmbeddingMap {
    pub kind: EmbeddingKind,
    /// Ambient indices of K_{H^⊥} (Φ) or K_H (Ψ), in slot order. Contains 0.
    pub transversal: Vec<usize>,
    pub source: Arc<Domain>,
    pub target: Arc<Domain>,
}

/// Φ for H ≤ G. The transversal takes the smallest index in each coset of H^⊥.
pub fn build_phi(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<EmbeddingMap> {
    let source = Domain::subgroup(group, h)?;
    let transversal = (0..source.n())
        .map(|w| source.freq_ambient_index(w))
        .collect();
    Ok(EmbeddingMap {
        kind: EmbeddingKind::Phi,
        transversal,
        source,
        target: Domain::full(group),
    })
}

/// Ψ for H ≤ G, with the smallest index in each coset of H as representative.
pub fn build_psi(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<EmbeddingMap> {
    let source = Domain::quotient(group, h)?;
    let transversal = (0..source.n())
        .map(|t| source.time_ambient_index(t))
        .collect();
    Ok(EmbeddingMap {
        kind: EmbeddingKind::Psi,
        transversal,
        source,
        target: Domain::full(group),
    })
}

impl EmbeddingMap {
    /// Image of a source phase point in G×Ĝ.
    pub fn map(&self, p: usize) -> usize {
        self.source
            .embed_point(p, &self.target)
            .expect("labels of H×Ĥ and (G/H)×H^⊥ are labels of G×Ĝ")
    }

    fn transfer(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        match self.source.kind() {
            DomainKind::Quotient => self.source.periodize_from_ambient(f),
            _ => self.source.restrict_from_ambient(f),
        }
    }

    /// Largest of |π(χ)T f − T π(E(χ)) f| over random χ and f, where T is
    /// R_H for Φ and P_H for Ψ.
    pub fn intertwining_residual(&self, rng: &mut impl rand::Rng, trials: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let p = rng.random_range(0..self.source.phase_len());
            let f = linalg::random_vector(rng, self.target.n());
            let lhs = self.source.tf_shift(p, &self.transfer(&f)?)?;
            let rhs = self.transfer(&self.target.tf_shift(self.map(p), &f)?)?;
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
        Ok(worst)
    }

    /// Injectivity and Φ(0) = 0, checked over the whole source.
    pub fn is_injective_embedding(&self) -> bool {
        let mut seen = vec![false; self.target.phase_len()];
        for p in 0..self.source.phase_len() {
            let q = self.map(p);
            if seen[q] {
                return false;
            }
            seen[q] = true;
        }
        self.map(0) == 0
    }
}
