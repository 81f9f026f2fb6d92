//! Sampling and periodization of dual Gabor generators, with the hypotheses
//! of the transfer theorems checked rather than assumed.
//!
//! In the finite model G×Ĝ is realised by `Domain::full`, H×Ĥ by
//! `Domain::subgroup` (frequencies labelled by K_{H^⊥}) and (G/H)×H^⊥ by
//! `Domain::quotient` (times labelled by K_H). Φ and Ψ are then the identity
//! on labels.

mod embedding;
pub mod real;

pub use embedding::{build_phi, build_psi, EmbeddingKind, EmbeddingMap};

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::error::{Error, Hypothesis, Result};
use crate::frames::{self, BoundChain, FrameReport, CHAIN_SLACK};
use crate::lca::{self, FiniteAbelianGroup, Subgroup};
use crate::rational::{self, Rational};
use crate::timefreq::{max_abs_diff, norm2, Domain, DomainKind, PhaseSubgroup};

/// WR residual below which inputs count as dual.
pub const DUAL_TOL: f64 = 1e-9;
/// Agreement required between transferred and recomputed canonical duals.
pub const CANONICAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sample,
    Periodize,
    /// Sampling ℝ → γℤ followed by periodization γℤ → ℤ_d.
    Chain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisChecks {
    /// (i): Λ ⊆ H×Ĝ, resp. Λ ⊆ G×H^⊥.
    pub lattice_in_strip: bool,
    /// (ii): Φ(Λ̃°) ⊆ Λ°, resp. Ψ(Λ̃°) ⊆ Λ°.
    pub adjoint_embeds: bool,
    /// (ii*): Φ(Λ̃°) = Λ° ∩ (G×K_{H^⊥}), resp. Ψ(Λ̃°) = Λ° ∩ (K_H×Ĝ).
    pub strengthened: bool,
    /// True when the checks were decided by structure (lattices on ℝ) rather
    /// than by enumeration.
    pub structural: bool,
}

impl HypothesisChecks {
    pub fn holds(&self) -> bool {
        self.lattice_in_strip && self.adjoint_embeds
    }

    /// The first failing hypothesis as an error.
    pub fn require(&self, detail: &str) -> Result<()> {
        if !self.lattice_in_strip {
            return Err(Error::HypothesisViolation {
                which: Hypothesis::LatticeInStrip,
                detail: detail.into(),
            });
        }
        if !self.adjoint_embeds {
            return Err(Error::HypothesisViolation {
                which: Hypothesis::AdjointEmbeds,
                detail: detail.into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferReport {
    pub mode: Mode,
    pub c: f64,
    #[serde(with = "rational::as_object")]
    pub c_squared: Rational,
    #[serde(with = "rational::as_object")]
    pub s_lambda: Rational,
    #[serde(with = "rational::as_object")]
    pub s_lambda_tilde: Rational,
    pub hypotheses: HypothesisChecks,
    pub wr_residual_before: f64,
    pub wr_residual_after: f64,
    /// Certified bound for truncation effects included in the residuals.
    pub tail_bound: f64,
    pub bounds: FrameReport,
    pub bound_chain: Option<BoundChain>,
    pub canonical_preserved: Option<bool>,
    /// max_j ‖h̃_j − S̃^{-1} g̃_j‖₂ when canonical preservation was tested.
    pub canonical_gap: Option<f64>,
}

/// Output of a transfer: the new tuples and the report.
#[derive(Clone, Debug)]
pub struct Transferred {
    pub gs: Vec<Vec<Complex64>>,
    pub hs: Vec<Vec<Complex64>>,
    pub report: TransferReport,
}

fn target_kind(mode: Mode) -> DomainKind {
    match mode {
        Mode::Sample => DomainKind::Subgroup,
        Mode::Periodize | Mode::Chain => DomainKind::Quotient,
    }
}

/// The domain H (sampling) or G/H (periodization) for a subgroup of G.
pub fn target_domain(mode: Mode, group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Arc<Domain>> {
    match mode {
        Mode::Sample => Domain::subgroup(group, h),
        Mode::Periodize | Mode::Chain => Domain::quotient(group, h),
    }
}

fn check_pair(
    mode: Mode,
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
) -> Result<(Arc<Domain>, Arc<Domain>, Subgroup)> {
    if mode == Mode::Chain {
        return Err(Error::invalid(
            "the finite engine runs one sampling or periodization step",
        ));
    }
    let full = lambda.domain().clone();
    let small = lambda_tilde.domain().clone();
    if full.kind() != DomainKind::Full {
        return Err(Error::invalid("Λ must live on the full phase space G×Ĝ"));
    }
    if small.kind() != target_kind(mode) || small.ambient() != full.ambient() {
        return Err(Error::invalid(
            "Λ̃ must live on the target domain of the same ambient group",
        ));
    }
    let h = small.h().expect("target domains carry H").clone();
    Ok((full, small, h))
}

/// Membership of Λ in the strip H×Ĝ (sampling) or G×H^⊥ (periodization).
fn lattice_in_strip(mode: Mode, lambda: &PhaseSubgroup, h: &Subgroup) -> Result<bool> {
    let full = lambda.domain();
    Ok(match mode {
        Mode::Sample => lambda
            .points()
            .iter()
            .all(|&p| h.contains_index(full.split(p).0)),
        Mode::Periodize | Mode::Chain => {
            let h_perp = lca::annihilator(full.ambient(), h)?;
            lambda
                .points()
                .iter()
                .all(|&p| h_perp.contains_index(full.split(p).1))
        }
    })
}

/// Exhaustive check of (i), (ii) and (ii*).
pub fn check_hypotheses(
    mode: Mode,
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
) -> Result<HypothesisChecks> {
    let (full, small, h) = check_pair(mode, lambda, lambda_tilde)?;
    let adj = lambda.adjoint();
    let adj_tilde = lambda_tilde.adjoint();
    let mut embedded = Vec::with_capacity(adj_tilde.len());
    let mut embeds = true;
    for &p in adj_tilde.points() {
        match small.embed_point(p, &full) {
            Some(q) if adj.contains(q) => embedded.push(q),
            _ => embeds = false,
        }
    }
    // Λ° ∩ (G×K_{H^⊥}) or Λ° ∩ (K_H×Ĝ): points whose labels are transversal labels.
    let strengthened = embeds && {
        let in_strip: Vec<usize> = adj
            .points()
            .iter()
            .copied()
            .filter(|&q| {
                let (t, w) = full.split(q);
                match mode {
                    Mode::Sample => small
                        .freq_slot(w)
                        .is_some_and(|s| small.freq_ambient_index(s) == w),
                    Mode::Periodize | Mode::Chain => small
                        .time_slot(t)
                        .is_some_and(|s| small.time_ambient_index(s) == t),
                }
            })
            .collect();
        embedded.sort_unstable();
        in_strip == embedded
    };
    Ok(HypothesisChecks {
        lattice_in_strip: lattice_in_strip(mode, lambda, &h)?,
        adjoint_embeds: embeds,
        strengthened,
        structural: false,
    })
}

/// (ii*) as a plain boolean.
pub fn check_canonical_preservation(
    mode: Mode,
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
) -> Result<bool> {
    Ok(check_hypotheses(mode, lambda, lambda_tilde)?.strengthened)
}

/// The largest admissible target: Λ̃° = {χ̃ : Φ(χ̃) ∈ Λ°} (resp. Ψ), Λ̃ its adjoint.
pub fn default_target(mode: Mode, lambda: &PhaseSubgroup, h: &Subgroup) -> Result<PhaseSubgroup> {
    let full = lambda.domain();
    let small = target_domain(mode, full.ambient(), h)?;
    let adj = lambda.adjoint();
    let pts: Vec<usize> = (0..small.phase_len())
        .filter(|&p| small.embed_point(p, full).is_some_and(|q| adj.contains(q)))
        .collect();
    Ok(PhaseSubgroup::from_points(&small, pts).adjoint())
}

/// c² = s(Λ̃) s(H) / s(Λ) for sampling and s(Λ̃) s(H^⊥) / s(Λ) for periodization,
/// with counting measure on G and on H, so s(H) = |G|/|H| and s(H^⊥) = 1.
pub fn prefactor_squared(
    mode: Mode,
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
) -> Rational {
    let g = lambda.domain().n() as i64;
    let h = match mode {
        Mode::Sample => lambda_tilde.domain().n() as i64,
        Mode::Periodize | Mode::Chain => g / lambda_tilde.domain().n() as i64,
    };
    let s_h = match mode {
        Mode::Sample => Rational::new(g, h),
        Mode::Periodize | Mode::Chain => Rational::from_integer(1),
    };
    lambda_tilde.covolume() * s_h / lambda.covolume()
}

fn transfer_vector(mode: Mode, small: &Domain, f: &[Complex64], c: f64) -> Result<Vec<Complex64>> {
    let v = match mode {
        Mode::Sample => small.restrict_from_ambient(f)?,
        Mode::Periodize | Mode::Chain => small.periodize_from_ambient(f)?,
    };
    Ok(v.into_iter().map(|x| x * c).collect())
}

/// Applies R_H or P_H to both tuples and certifies the result.
pub fn transfer_generators(
    mode: Mode,
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
) -> Result<Transferred> {
    let (_, small, _) = check_pair(mode, lambda, lambda_tilde)?;
    let hyp = check_hypotheses(mode, lambda, lambda_tilde)?;
    hyp.require(&format!(
        "|Λ| = {}, |Λ̃| = {}",
        lambda.len(),
        lambda_tilde.len()
    ))?;
    let before = frames::wexler_raz_residual(gs, hs, lambda)?;
    if before > DUAL_TOL {
        return Err(Error::PreconditionViolation(format!(
            "inputs are not dual (WR residual {before:e})"
        )));
    }
    let c2 = prefactor_squared(mode, lambda, lambda_tilde);
    let c = rational::to_f64(c2).sqrt();
    let gt = gs
        .iter()
        .map(|g| transfer_vector(mode, &small, g, c))
        .collect::<Result<Vec<_>>>()?;
    let ht = hs
        .iter()
        .map(|h| transfer_vector(mode, &small, h, c))
        .collect::<Result<Vec<_>>>()?;
    let after = frames::wexler_raz_residual(&gt, &ht, lambda_tilde)?;
    let bounds = frames::frame_report(&gt, Some(&ht), lambda_tilde)?;
    let m = algebra::module_norm(&gt, lambda_tilde)?;
    let chain = BoundChain::evaluate(
        1.0 / frames::bessel_constant(hs, lambda)?,
        bounds.a_opt,
        bounds.b_opt,
        m * m,
        frames::bessel_constant(gs, lambda)?,
        CHAIN_SLACK,
    );
    // Canonical preservation is only meaningful when the inputs are a canonical pair.
    let canonical_gap = if hyp.strengthened && bounds.is_frame && is_canonical_pair(gs, hs, lambda)?
    {
        Some(canonical_gap(&gt, &ht, lambda_tilde)?)
    } else {
        None
    };
    Ok(Transferred {
        gs: gt,
        hs: ht,
        report: TransferReport {
            mode,
            c,
            c_squared: c2,
            s_lambda: lambda.covolume(),
            s_lambda_tilde: lambda_tilde.covolume(),
            hypotheses: hyp,
            wr_residual_before: before,
            wr_residual_after: after,
            tail_bound: 0.0,
            bounds,
            bound_chain: Some(chain),
            canonical_preserved: canonical_gap.map(|g| g < CANONICAL_TOL),
            canonical_gap,
        },
    })
}

/// g̃_j = c R_H g_j, h̃_j = c R_H h_j; dual frames for ℓ²(H) on Λ̃.
pub fn sample_generators(
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
) -> Result<Transferred> {
    transfer_generators(Mode::Sample, lambda, lambda_tilde, gs, hs)
}

/// g̃_j = c P_H g_j, h̃_j = c P_H h_j; dual frames for ℓ²(G/H) on Λ̃.
pub fn periodize_generators(
    lambda: &PhaseSubgroup,
    lambda_tilde: &PhaseSubgroup,
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
) -> Result<Transferred> {
    transfer_generators(Mode::Periodize, lambda, lambda_tilde, gs, hs)
}

/// max_j ‖h_j − S^{-1} g_j‖₂ on Λ.
pub fn canonical_gap(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<f64> {
    let dual = frames::canonical_dual(gs, lambda)?;
    Ok(hs
        .iter()
        .zip(&dual)
        .map(|(a, b)| norm2(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
        .fold(0.0, f64::max))
}

/// True when (h_j) is the canonical dual of (g_j) on Λ.
pub fn is_canonical_pair(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<bool> {
    let dual = match frames::canonical_dual(gs, lambda) {
        Ok(d) => d,
        Err(Error::NotAFrame(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(hs
        .iter()
        .zip(&dual)
        .all(|(a, b)| max_abs_diff(a, b) < CANONICAL_TOL))
}

/// max |P_H f − F⁻¹_{G/H} R_{H^⊥} F_G f| for one vector on G.
pub fn fourier_route_residual(
    group: &FiniteAbelianGroup,
    h: &Subgroup,
    f: &[Complex64],
) -> Result<f64> {
    let full = Domain::full(group);
    let quotient = Domain::quotient(group, h)?;
    let direct = quotient.periodize_from_ambient(f)?;
    let fhat = full.fourier(f)?;
    let restricted: Vec<Complex64> = (0..quotient.n())
        .map(|w| {
            fhat[full
                .freq_slot(quotient.freq_ambient_index(w))
                .expect("H^⊥ ⊆ Ĝ")]
        })
        .collect();
    let routed = quotient.inverse_fourier(&restricted)?;
    Ok(max_abs_diff(&direct, &routed))
}

#[cfg(test)]
mod tests;
