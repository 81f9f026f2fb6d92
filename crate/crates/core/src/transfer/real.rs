//! Transfers that start on ℝ: lattices with rational generators, the
//! structural hypothesis checks for sampling ℝ → γℤ, and the chain
//! ℝ → γℤ → ℤ_d.
//!
//! On ℝ the hypotheses are decided from the generators in exact arithmetic;
//! no enumeration of an infinite lattice is involved.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{canonical_gap, HypothesisChecks, Mode, TransferReport, CANONICAL_TOL};
use crate::algebra::{self, BanachElement};
use crate::continuous::{
    inner_product_with_error, janssen_coefficients, restrict, JanssenOptions, SampledSequence,
    Window, EPS_QUAD, EPS_TAIL,
};
use crate::error::{Error, Result};
use crate::frames::{self, BoundChain, CHAIN_SLACK};
use crate::lca::FiniteAbelianGroup;
use crate::rational::{self, Rational};
use crate::timefreq::{Domain, LatticeR2, PhaseSubgroup};

/// Frequency radius of the Janssen box used for Bessel bounds of compact windows.
pub const BESSEL_FREQ_RADIUS: i64 = 256;
/// Box radius of the duality check on ℝ.
pub const DUALITY_RADIUS: i64 = 8;
/// Largest WR residual on ℝ accepted as duality.
pub const REAL_DUAL_TOL: f64 = 1e-8;

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// A·ℤ² with rational entries; columns of A are the basis, row 0 is time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalLattice {
    pub generator: [[Rational; 2]; 2],
}

impl RationalLattice {
    pub fn new(generator: [[Rational; 2]; 2]) -> Result<Self> {
        let l = RationalLattice { generator };
        if l.det().is_zero() {
            return Err(Error::invalid("lattice generator is singular"));
        }
        Ok(l)
    }

    pub fn separable(alpha: Rational, beta: Rational) -> Result<Self> {
        Self::new([[alpha, q(0)], [q(0), beta]])
    }

    /// [[α, qα], [0, β]]·ℤ².
    pub fn sheared(alpha: Rational, beta: Rational, shear: Rational) -> Result<Self> {
        Self::new([[alpha, shear * alpha], [q(0), beta]])
    }

    pub fn det(&self) -> Rational {
        let a = self.generator;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    pub fn covolume(&self) -> Rational {
        self.det().abs()
    }

    pub fn column(&self, j: usize) -> [Rational; 2] {
        [self.generator[0][j], self.generator[1][j]]
    }

    pub fn point(&self, m1: i64, m2: i64) -> [Rational; 2] {
        let a = self.generator;
        [a[0][0] * m1 + a[0][1] * m2, a[1][0] * m1 + a[1][1] * m2]
    }

    /// Coordinates of p in the basis, A⁻¹p.
    pub fn coords(&self, p: [Rational; 2]) -> [Rational; 2] {
        let a = self.generator;
        let det = self.det();
        [
            (a[1][1] * p[0] - a[0][1] * p[1]) / det,
            (a[0][0] * p[1] - a[1][0] * p[0]) / det,
        ]
    }

    pub fn contains(&self, p: [Rational; 2]) -> bool {
        self.coords(p).iter().all(|c| c.is_integer())
    }

    /// {z : σ(z, λ) ∈ ℤ for all λ}, with generator Bᵀ J A = I, in Hermite form.
    pub fn adjoint(&self) -> RationalLattice {
        let a = self.generator;
        let det = self.det();
        let ja = [[-a[1][0], -a[1][1]], [a[0][0], a[0][1]]];
        let inv = [
            [ja[1][1] / det, -ja[0][1] / det],
            [-ja[1][0] / det, ja[0][0] / det],
        ];
        RationalLattice {
            generator: [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]],
        }
        .hermite()
    }

    /// Same lattice with generator [[b11, b12], [0, b22]], b11, b22 > 0, 0 ≤ b12 < b11.
    pub fn hermite(&self) -> RationalLattice {
        let mut c0 = self.column(0);
        let mut c1 = self.column(1);
        // Euclid on the frequency entries.
        while !c0[1].is_zero() {
            if c1[1].is_zero() || c0[1].abs() < c1[1].abs() {
                std::mem::swap(&mut c0, &mut c1);
                continue;
            }
            let k = (c0[1] / c1[1]).floor();
            c0 = [c0[0] - k * c1[0], c0[1] - k * c1[1]];
            std::mem::swap(&mut c0, &mut c1);
        }
        if c0[0] < q(0) {
            c0 = [-c0[0], q(0)];
        }
        if c1[1] < q(0) {
            c1 = [-c1[0], -c1[1]];
        }
        let k = (c1[0] / c0[0]).floor();
        c1[0] -= k * c0[0];
        RationalLattice {
            generator: [[c0[0], c1[0]], [q(0), c1[1]]],
        }
    }

    pub fn to_f64(&self) -> LatticeR2 {
        let g = self.generator.map(|row| row.map(rational::to_f64));
        LatticeR2 { generator: g }
    }
}

/// Structural checks for R_{γℤ} with Λ̃ = image of Λ in γℤ × [0, 1/γ).
///
/// (i) holds when the time entries of the generators lie in γℤ. Λ̃ is a
/// lattice of the same covolume exactly when (0, 1/γ) ∈ Λ; its second basis
/// coordinate is the length of the index range of Λ̃. Λ̃° = Λ° ∩ (γℤ × [0, 1/γ))
/// is then the adjoint of Λ̃ in γℤ × [0, 1/γ), so (ii) holds by construction.
/// (ii*) asks that all of Λ° ∩ (ℝ × [0, 1/γ)) have times in γℤ, i.e. that the
/// time entries of the generators of Λ° lie in γℤ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealSamplingCheck {
    #[serde(with = "rational::as_object")]
    pub gamma: Rational,
    pub hypotheses: HypothesisChecks,
    /// Second basis coordinate of (0, 1/γ) in Λ.
    pub period_count: i64,
    #[serde(with = "rational::as_object")]
    pub c_squared: Rational,
}

pub fn check_real_sampling(lambda: &RationalLattice, gamma: Rational) -> Result<RealSamplingCheck> {
    if gamma <= q(0) {
        return Err(Error::invalid("sampling step must be positive"));
    }
    let in_grid = |x: Rational| (x / gamma).is_integer();
    let period = [q(0), gamma.recip()];
    if !lambda.contains(period) {
        return Err(Error::invalid(
            "(0, 1/γ) is not in Λ, so Λ does not descend to γℤ × [0, 1/γ)",
        ));
    }
    let adj = lambda.adjoint();
    let strip = in_grid(lambda.generator[0][0]) && in_grid(lambda.generator[0][1]);
    Ok(RealSamplingCheck {
        gamma,
        hypotheses: HypothesisChecks {
            lattice_in_strip: strip,
            adjoint_embeds: true,
            strengthened: strip && in_grid(adj.generator[0][0]) && in_grid(adj.generator[0][1]),
            structural: true,
        },
        period_count: lambda.coords(period)[1].to_integer().abs(),
        // s(Λ̃) = s(Λ) and s(γℤ) = γ.
        c_squared: gamma,
    })
}

/// Residual of the WR equations on γℤ for truncated sequences, with the
/// certified effect of the truncation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SampledWr {
    pub residual: f64,
    pub tail_bound: f64,
    pub equations: usize,
}

fn sup(s: &SampledSequence) -> f64 {
    s.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// max over Λ̃° = Λ° ∩ (γℤ × [0, 1/γ)) of |Σ_j ⟨h̃_j, π(λ̃°)* g̃_j⟩ − s δ|, with
/// ⟨h̃, π(x,ω)* g̃⟩ = Σ_t h̃(t) e^{2πiω(t+x)} conj g̃(t+x) over t ∈ γℤ.
///
/// Only finitely many equations are nonzero for the stored sequences; the
/// dropped mass changes any equation by at most τ_h(sup g̃ + τ_g) + sup h̃ τ_g.
pub fn sampled_wr_residual(
    gs: &[SampledSequence],
    hs: &[SampledSequence],
    adjoint: &RationalLattice,
    gamma: Rational,
    s_lambda: f64,
) -> Result<SampledWr> {
    if gs.len() != hs.len() || gs.is_empty() {
        return Err(Error::invalid(
            "tuples must be nonempty and of equal length",
        ));
    }
    let gf = rational::to_f64(gamma);
    if gs.iter().chain(hs).any(|s| s.gamma != gf) {
        return Err(Error::invalid("sequences must live on γℤ"));
    }
    let mut k_lo = i64::MAX;
    let mut k_hi = i64::MIN;
    let mut tail = 0.0;
    for (g, h) in gs.iter().zip(hs) {
        if g.coeffs.is_empty() || h.coeffs.is_empty() {
            continue;
        }
        k_lo = k_lo.min(g.indices().start - (h.indices().end - 1));
        k_hi = k_hi.max(g.indices().end - 1 - h.indices().start);
        tail += h.tail_bound * (sup(g) + g.tail_bound) + sup(h) * g.tail_bound;
    }
    let b = adjoint.hermite().generator;
    let (b11, b12, b22) = (b[0][0], b[0][1], b[1][1]);
    let top = gamma.recip();
    let mut points = Vec::new();
    let mut m2 = 0i64;
    while b22 * m2 < top {
        if k_lo <= k_hi {
            let lo = ((gamma * k_lo - b12 * m2) / b11).ceil().to_integer();
            let hi = ((gamma * k_hi - b12 * m2) / b11).floor().to_integer();
            for m1 in lo..=hi {
                let x = b11 * m1 + b12 * m2;
                let k = x / gamma;
                if k.is_integer() {
                    points.push((k.to_integer(), rational::to_f64(b22 * m2 * gamma)));
                }
            }
        }
        m2 += 1;
    }
    if !points.iter().any(|&(k, _)| k == 0) {
        points.push((0, 0.0));
    }
    let residual = points
        .par_iter()
        .map(|&(k, nu)| {
            // ν = ωγ, so e^{2πiω(t+x)} = e^{2πiν(i+k)} at t = γi.
            let mut acc = Complex64::new(0.0, 0.0);
            for (g, h) in gs.iter().zip(hs) {
                for i in h.indices() {
                    let gv = g.get(i + k);
                    if gv != Complex64::new(0.0, 0.0) {
                        acc += h.get(i)
                            * gv.conj()
                            * Complex64::from_polar(1.0, TAU * nu * (i + k) as f64);
                    }
                }
            }
            if k == 0 && nu == 0.0 {
                acc -= s_lambda;
            }
            acc.norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(SampledWr {
        residual,
        tail_bound: tail,
        equations: points.len(),
    })
}

/// π(λ°)* w = e^{−2πiωx} π(−x, −ω) w.
fn adjoint_shift(w: &Window, p: [f64; 2]) -> Window {
    w.clone()
        .tf_shift(-p[0], -p[1])
        .scaled(Complex64::from_polar(1.0, -TAU * p[0] * p[1]))
}

/// WR residual of (g_j), (h_j) on ℝ over the box |m| ≤ radius of Λ° in Hermite
/// coordinates, with the summed quadrature error.
pub fn real_wr_residual(
    gs: &[Window],
    hs: &[Window],
    lambda: &RationalLattice,
    radius: i64,
) -> Result<(f64, f64)> {
    if gs.len() != hs.len() || gs.is_empty() {
        return Err(Error::invalid(
            "tuples must be nonempty and of equal length",
        ));
    }
    let adj = lambda.adjoint().to_f64();
    let s = rational::to_f64(lambda.covolume());
    let pts: Vec<(i64, i64)> = (-radius..=radius)
        .flat_map(|a| (-radius..=radius).map(move |b| (a, b)))
        .collect();
    let vals = pts
        .par_iter()
        .map(|&(m1, m2)| {
            let p = adj.point(m1, m2);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut err = 0.0;
            for (g, h) in gs.iter().zip(hs) {
                let r = inner_product_with_error(h, &adjoint_shift(g, p), EPS_QUAD)?;
                acc += r.value;
                err += r.error;
            }
            if (m1, m2) == (0, 0) {
                acc -= s;
            }
            Ok((acc.norm(), err))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vals
        .iter()
        .fold((0.0, 0.0), |(r, e), &(a, b)| (r.max(a), e + b)))
}

/// Upper bound (1/s(Λ)) Σ_j Σ_{λ°} |⟨g_j, π(λ°)* g_j⟩| for the Bessel bound on ℝ,
/// including the certified tail of the Janssen box.
pub fn real_bessel_bound(gs: &[Window], lambda: &RationalLattice) -> Result<f64> {
    let adj = lambda.adjoint().to_f64();
    let weight = 1.0 / rational::to_f64(lambda.covolume());
    let mut opts = JanssenOptions::default();
    if gs.iter().all(|g| g.support().is_some()) {
        let len = gs
            .iter()
            .map(|g| g.support().map_or(0.0, |(a, b)| b - a))
            .fold(0.0, f64::max);
        let r1 = (len / adj.generator[0][0]).ceil() as i64 + 1;
        opts.radius = Some([r1, BESSEL_FREQ_RADIUS]);
    }
    Ok(janssen_coefficients(gs, &adj, weight, &opts)?.norm1())
}

/// αβ = a/M = b/N, d = Mb = aN.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    #[serde(with = "rational::as_object")]
    pub alpha: Rational,
    #[serde(with = "rational::as_object")]
    pub beta: Rational,
    pub a: i64,
    pub b: i64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "N")]
    pub n: i64,
}

impl ChainParams {
    /// α = 1, β = 2/5, a = b = 2, M = N = 5, d = 10.
    pub fn theta_2_5() -> Self {
        ChainParams {
            alpha: q(1),
            beta: rational::ratio(2, 5),
            a: 2,
            b: 2,
            m: 5,
            n: 5,
        }
    }

    /// Checks the constraints exactly and returns d.
    pub fn validate(&self) -> Result<usize> {
        if self.alpha <= q(0)
            || self.beta <= q(0)
            || [self.a, self.b, self.m, self.n].iter().any(|&v| v <= 0)
        {
            return Err(Error::invalid("chain parameters must be positive"));
        }
        let theta = self.alpha * self.beta;
        if theta != rational::ratio(self.a, self.m) || theta != rational::ratio(self.b, self.n) {
            return Err(Error::invalid(format!(
                "αβ = {theta} must equal a/M = {}/{} and b/N = {}/{}",
                self.a, self.m, self.b, self.n
            )));
        }
        let d = self.m * self.b;
        debug_assert_eq!(d, self.a * self.n);
        Ok(d as usize)
    }

    /// γ = α/a, the step of the intermediate group.
    pub fn gamma(&self) -> Rational {
        self.alpha / self.a
    }

    pub fn lattice(&self) -> Result<RationalLattice> {
        RationalLattice::separable(self.alpha, self.beta)
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ChainOptions {
    /// The inputs form a canonical pair; enables the preservation test.
    pub canonical: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageOneReport {
    pub check: RealSamplingCheck,
    /// WR residual of the inputs on ℝ over a box of Λ°.
    pub real_wr_residual: f64,
    pub real_wr_quadrature_error: f64,
    pub sampled: SampledWr,
}

#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub d: usize,
    pub lattice: PhaseSubgroup,
    pub gs: Vec<Vec<Complex64>>,
    pub hs: Vec<Vec<Complex64>>,
    pub stage_one: StageOneReport,
    pub report: TransferReport,
}

/// Stage-2 hypotheses for P_{dℤ} from ℤ × 𝕋 to ℤ_d, decided on generators.
///
/// Λ̃ is generated by (a, 0) and (0, ν) with ν = βγ; Λ̃° by (1/ν, 0) and (0, 1/a).
/// (i) asks ν ∈ (1/d)ℤ. (ii) asks Ψ(M, 0) = (M, 0) and Ψ(0, N) = (0, N/d) to lie
/// in Λ̃°. (ii*) compares |Λ̃° ∩ ([0, d) × 𝕋)| = (d ν) a with |Λ̃̃°| = d²/(NM),
/// which together with (ii) gives equality.
fn stage_two_checks(p: &ChainParams, d: i64) -> HypothesisChecks {
    let nu = p.beta * p.gamma();
    let strip = (nu * d).is_integer() && (p.alpha / p.gamma()).is_integer();
    let inv_nu = nu.recip();
    let embeds = inv_nu.is_integer()
        && (q(p.m) / inv_nu).is_integer()
        && (rational::ratio(p.n, d) * p.a).is_integer()
        && d % inv_nu.to_integer() == 0;
    let strengthened = embeds && (nu * d) * p.a == rational::ratio(d * d, p.n * p.m);
    HypothesisChecks {
        lattice_in_strip: strip,
        adjoint_embeds: embeds,
        strengthened,
        structural: true,
    }
}

fn and(a: HypothesisChecks, b: HypothesisChecks) -> HypothesisChecks {
    HypothesisChecks {
        lattice_in_strip: a.lattice_in_strip && b.lattice_in_strip,
        adjoint_embeds: a.adjoint_embeds && b.adjoint_embeds,
        strengthened: a.strengthened && b.strengthened,
        structural: true,
    }
}

fn sample(ws: &[Window], gamma: Rational, c: f64) -> Result<Vec<SampledSequence>> {
    ws.iter()
        .map(|w| Ok(restrict(w, rational::to_f64(gamma), EPS_TAIL)?.scale(Complex64::new(c, 0.0))))
        .collect()
}

/// Λ̃̃ = aℤ_N × bℤ_M in ℤ_d².
pub fn chain_target(params: &ChainParams) -> Result<PhaseSubgroup> {
    let d = params.validate()?;
    let domain = Domain::full(&FiniteAbelianGroup::cyclic(d));
    PhaseSubgroup::from_labels(
        &domain,
        &[
            (vec![params.a as usize % d], vec![0]),
            (vec![0], vec![params.b as usize % d]),
        ],
    )
}

/// √γ P_{dℤ} R_{γℤ} applied to each window, after checking the hypotheses of
/// both stages. No duality is required, so this also transfers differences.
pub fn chain_transfer(
    ws: &[Window],
    params: &ChainParams,
) -> Result<(Vec<Vec<Complex64>>, PhaseSubgroup)> {
    let d = params.validate()?;
    let gamma = params.gamma();
    check_real_sampling(&params.lattice()?, gamma)?
        .hypotheses
        .require(&format!("γ = {gamma}"))?;
    stage_two_checks(params, d as i64).require(&format!("d = {d}"))?;
    let vs = sample(ws, gamma, rational::to_f64(gamma).sqrt())?
        .iter()
        .map(|s| s.periodize(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((vs, chain_target(params)?))
}

/// Stage one alone: checks, duality on ℝ, and the sampled WR equations.
pub fn sample_real(
    gs: &[Window],
    hs: &[Window],
    lambda: &RationalLattice,
    gamma: Rational,
) -> Result<(Vec<SampledSequence>, Vec<SampledSequence>, StageOneReport)> {
    let check = check_real_sampling(lambda, gamma)?;
    check.hypotheses.require(&format!("γ = {gamma}"))?;
    let (wr, qerr) = real_wr_residual(gs, hs, lambda, DUALITY_RADIUS)?;
    if wr > REAL_DUAL_TOL {
        return Err(Error::PreconditionViolation(format!(
            "inputs are not dual on ℝ (WR residual {wr:e})"
        )));
    }
    let c = rational::to_f64(check.c_squared).sqrt();
    let gt = sample(gs, gamma, c)?;
    let ht = sample(hs, gamma, c)?;
    let sampled = sampled_wr_residual(
        &gt,
        &ht,
        &lambda.adjoint(),
        gamma,
        rational::to_f64(lambda.covolume()),
    )?;
    Ok((
        gt,
        ht,
        StageOneReport {
            check,
            real_wr_residual: wr,
            real_wr_quadrature_error: qerr,
            sampled,
        },
    ))
}

/// ℝ → γℤ → ℤ_d with γ = α/a: g̃̃(t) = √(α/a) Σ_k g(α a⁻¹ (t − kd)) on Λ̃̃ = aℤ_N × bℤ_M.
pub fn chain_r_to_zd(
    gs: &[Window],
    hs: &[Window],
    params: &ChainParams,
    opts: &ChainOptions,
) -> Result<ChainOutput> {
    let d = params.validate()?;
    let lambda = params.lattice()?;
    let gamma = params.gamma();
    let (gt, ht, stage_one) = sample_real(gs, hs, &lambda, gamma)?;
    let stage2 = stage_two_checks(params, d as i64);
    stage2.require(&format!("d = {d}"))?;
    let hyp = and(stage_one.check.hypotheses, stage2);

    // Periodization onto ℤ_d with c = 1: s(Λ̃̃) = s(Λ̃) and s(H^⊥) = 1.
    let gtt = gt
        .iter()
        .map(|s| s.periodize(d))
        .collect::<Result<Vec<_>>>()?;
    let htt = ht
        .iter()
        .map(|s| s.periodize(d))
        .collect::<Result<Vec<_>>>()?;
    let target = chain_target(params)?;
    let supn = |v: &[Complex64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail: f64 = gt
        .iter()
        .zip(&ht)
        .zip(gtt.iter().zip(&htt))
        .map(|((g, h), (gv, hv))| {
            h.tail_bound * (supn(gv) + g.tail_bound) + supn(hv) * g.tail_bound
        })
        .sum();
    let after = frames::wexler_raz_residual(&gtt, &htt, &target)?;
    let bounds = frames::frame_report(&gtt, Some(&htt), &target)?;
    let m = algebra::module_norm(&gtt, &target)?;
    let chain = BoundChain::evaluate(
        1.0 / real_bessel_bound(hs, &lambda)?,
        bounds.a_opt,
        bounds.b_opt,
        m * m,
        real_bessel_bound(gs, &lambda)?,
        CHAIN_SLACK,
    );
    let canonical_gap = if opts.canonical && hyp.strengthened && bounds.is_frame {
        Some(canonical_gap(&gtt, &htt, &target)?)
    } else {
        None
    };
    let report = TransferReport {
        mode: Mode::Chain,
        c: rational::to_f64(gamma).sqrt(),
        c_squared: gamma,
        s_lambda: lambda.covolume(),
        s_lambda_tilde: target.covolume(),
        hypotheses: hyp,
        wr_residual_before: stage_one.real_wr_residual,
        wr_residual_after: after,
        tail_bound: tail,
        bounds,
        bound_chain: Some(chain),
        canonical_preserved: canonical_gap.map(|g| g < CANONICAL_TOL),
        canonical_gap,
    };
    Ok(ChainOutput {
        d,
        lattice: target,
        gs: gtt,
        hs: htt,
        stage_one,
        report,
    })
}

/// Sheared lattice Λ = [[α, qα], [0, β]]ℤ² with q = r/s and αβ = a/M, sampled
/// to γℤ with γ = α/(sa).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearedParams {
    #[serde(with = "rational::as_object")]
    pub alpha: Rational,
    #[serde(with = "rational::as_object")]
    pub beta: Rational,
    pub r: i64,
    pub s: i64,
    pub a: i64,
    #[serde(rename = "M")]
    pub m: i64,
}

impl ShearedParams {
    /// α = 1, β = 2/5, q = 1/2, a = 2, M = 5, γ = 1/4.
    pub fn preset() -> Self {
        ShearedParams {
            alpha: q(1),
            beta: rational::ratio(2, 5),
            r: 1,
            s: 2,
            a: 2,
            m: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha * self.beta != rational::ratio(self.a, self.m) {
            return Err(Error::invalid("αβ must equal a/M"));
        }
        if !(0 < self.r && self.r < self.s) {
            return Err(Error::invalid("q = r/s must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn gamma(&self) -> Rational {
        self.alpha / (self.s * self.a)
    }

    pub fn lattice(&self) -> Result<RationalLattice> {
        RationalLattice::sheared(self.alpha, self.beta, rational::ratio(self.r, self.s))
    }
}

/// Canonical dual of a Gaussian tuple on a lattice in ℝ², via a Neumann series
/// for ⟨(g_j), (g_j)⟩_{Λ°}, as finite sums of TF-shifted Gaussians.
pub fn neumann_dual(
    gs: &[Window],
    lambda: &LatticeR2,
    tol: f64,
) -> Result<(Vec<Window>, algebra::NeumannSummary)> {
    let adj = lambda.adjoint()?;
    let w = 1.0 / lambda.covolume();
    // The inverse decays more slowly than b itself; give it room beyond the adaptive box.
    let r = janssen_coefficients(gs, &adj, w, &JanssenOptions::default())?.radius[0];
    let b = janssen_coefficients(gs, &adj, w, &JanssenOptions::with_radius([2 * r + 4; 2]))?;
    let inv = algebra::neumann_inverse(&b, tol, 200)?;
    Ok((
        gs.iter()
            .map(|g| crate::continuous::right_action(g, &inv.inverse))
            .collect(),
        inv.summary(),
    ))
}

/// Stage-one report for the sheared preset with a Gaussian window.
pub fn sheared_sampling(g: &Window, params: &ShearedParams) -> Result<StageOneReport> {
    params.validate()?;
    let lambda = params.lattice()?;
    let check = check_real_sampling(&lambda, params.gamma())?;
    if check.period_count != params.s * params.m {
        return Err(Error::invalid(format!(
            "index range of Λ̃ has length {} rather than sM = {}",
            check.period_count,
            params.s * params.m
        )));
    }
    let (h, _) = neumann_dual(std::slice::from_ref(g), &lambda.to_f64(), 1e-14)?;
    let (_, _, report) = sample_real(std::slice::from_ref(g), &h, &lambda, params.gamma())?;
    Ok(report)
}

/// Structural data of the ℝ×ℤ_q preset: Λ generated by (α, r; 0, 0) and
/// (0, 0; β, s) in (ℝ×ℤ_q)², with qαβ = a/M and H = (α/a)ℤ × ℤ_q.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductParams {
    #[serde(with = "rational::as_object")]
    pub alpha: Rational,
    #[serde(with = "rational::as_object")]
    pub beta: Rational,
    pub q: i64,
    pub r: i64,
    pub s: i64,
    pub a: i64,
    #[serde(rename = "M")]
    pub m: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductChecks {
    pub r_inverse: i64,
    pub s_inverse: i64,
    /// σ(λ, μ) ∈ ℤ for all generator pairs of Λ and Λ°.
    pub adjoint_pairings_integral: bool,
    pub hypotheses: HypothesisChecks,
    /// (0, 0; a/α, 0) ∈ Λ at index qM, so Λ̃ has the index range 0..qM.
    pub period_count: i64,
    /// Λ̃° has the index range 0..aq on its frequency generator.
    pub adjoint_count: i64,
    #[serde(with = "rational::as_object")]
    pub s_lambda: Rational,
    #[serde(with = "rational::as_object")]
    pub c_squared: Rational,
}

fn mod_inverse(x: i64, q: i64) -> Option<i64> {
    let g = num_integer::Integer::extended_gcd(&x.rem_euclid(q), &q);
    (g.gcd == 1).then(|| g.x.rem_euclid(q))
}

impl ProductParams {
    /// α = 1, β = 2/5, q = 2, r = s = 1, a = 4, M = 5.
    pub fn preset() -> Self {
        ProductParams {
            alpha: q(1),
            beta: rational::ratio(2, 5),
            q: 2,
            r: 1,
            s: 1,
            a: 4,
            m: 5,
        }
    }

    /// Checks in exact arithmetic; Λ° is generated by ((βq)⁻¹, −s°; 0, 0) and
    /// (0, 0; (αq)⁻¹, −r°).
    pub fn check(&self) -> Result<ProductChecks> {
        let qq = self.q;
        if qq <= 0 || self.alpha <= q(0) || self.beta <= q(0) || self.a <= 0 || self.m <= 0 {
            return Err(Error::invalid("product preset parameters must be positive"));
        }
        if q(qq) * self.alpha * self.beta != rational::ratio(self.a, self.m) {
            return Err(Error::invalid("qαβ must equal a/M"));
        }
        let ri = mod_inverse(self.r, qq).ok_or_else(|| Error::invalid("r must be coprime to q"))?;
        let si = mod_inverse(self.s, qq).ok_or_else(|| Error::invalid("s must be coprime to q"))?;
        // Points (x, m; ω, k); σ(u, v) = ω_u x_v + k_u m_v / q − ω_v x_u − k_v m_u / q.
        type P = (Rational, i64, Rational, i64);
        let sigma = |u: P, v: P| {
            u.2 * v.0 + rational::ratio(u.3 * v.1, qq) - v.2 * u.0 - rational::ratio(v.3 * u.1, qq)
        };
        let lam: [P; 2] = [(self.alpha, self.r, q(0), 0), (q(0), 0, self.beta, self.s)];
        let adj: [P; 2] = [
            ((self.beta * qq).recip(), -si, q(0), 0),
            (q(0), 0, (self.alpha * qq).recip(), -ri),
        ];
        let integral = lam
            .iter()
            .all(|&l| adj.iter().all(|&m| sigma(l, m).is_integer()));
        let h_step = self.alpha / self.a;
        let strip = (self.alpha / h_step).is_integer();
        // (0,0; a/α, 0) = qM·(0,0; β, s) since qMβ = a/α and qMs ≡ 0 mod q.
        let period = q(qq * self.m) * self.beta == (h_step).recip();
        if !period {
            return Err(Error::invalid("Λ does not contain the period of Ĥ"));
        }
        let strengthened = strip && (adj[0].0 / h_step).is_integer();
        let adjoint_count = ((h_step.recip()) / adj[1].2).to_integer();
        Ok(ProductChecks {
            r_inverse: ri,
            s_inverse: si,
            adjoint_pairings_integral: integral,
            hypotheses: HypothesisChecks {
                lattice_in_strip: strip,
                adjoint_embeds: integral,
                strengthened,
                structural: true,
            },
            period_count: qq * self.m,
            adjoint_count,
            s_lambda: q(qq) * self.alpha * self.beta,
            c_squared: h_step,
        })
    }
}
