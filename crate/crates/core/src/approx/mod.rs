//! From sequences back to windows on ℝ: linear interpolation Q, the centered
//! embedding of ℂ^d into γℤ, the pipeline Q Q P R with γ = d^{-1/2}, module
//! norm distances, convergence sweeps, and the passage from an irrational θ
//! to nearby rational θ̃.

use std::time::Instant;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    self, neumann_inverse, neumann_inverse_around, BanachElement, LatticeElement, NeumannSummary,
};
use crate::continuous::{
    janssen_coefficients, restrict, right_action, JanssenOptions, PiecewisePoly, SampledSequence,
    Window, EPS_TAIL,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::timefreq::LatticeR2;
use crate::transfer::real::{
    chain_transfer, real_wr_residual, ChainParams, RationalLattice, BESSEL_FREQ_RADIUS,
    DUALITY_RADIUS, REAL_DUAL_TOL,
};

/// Neumann tolerance used by the sweep and by the rational step.
pub const NEUMANN_TOL: f64 = 1e-13;
pub const NEUMANN_MAX_ITER: usize = 500;
/// Frequency radius for distance bounds of compact windows. The certified tail
/// decays like 1/radius, and the box sum is cheap, so it is larger than the
/// Neumann box.
pub const DISTANCE_FREQ_RADIUS: i64 = 2048;

/// Q_{γℤ} s = Σ_k s(k) ∧_γ(· − γk), as a piecewise-linear window with knots on γℤ.
/// The knots span only the nonzero samples and one grid step on either side.
pub fn q_interp(s: &SampledSequence) -> Result<Window> {
    let zero = Complex64::new(0.0, 0.0);
    let first = s.coeffs.iter().position(|c| *c != zero).unwrap_or(0) as i64;
    let last = s.coeffs.iter().rposition(|c| *c != zero).unwrap_or(0) as i64;
    let k0 = s.offset + first - 1;
    let k1 = s.offset + last + 1;
    let nodes: Vec<f64> = (k0..=k1).map(|k| s.gamma * k as f64).collect();
    let values: Vec<Complex64> = (k0..=k1).map(|k| s.get(k)).collect();
    Ok(Window::PiecewisePoly(PiecewisePoly::linear_through(
        &nodes, &values,
    )?))
}

/// ‖Q s‖₂ ≤ ‖∧_γ‖₂ ‖s‖₁ with ‖∧_γ‖₂ = (2γ/3)^{1/2}.
pub fn q_interp_bound(s: &SampledSequence) -> f64 {
    (2.0 * s.gamma / 3.0).sqrt() * s.norm1()
}

/// Q^{γℤ}_d v: index k ∈ {−⌊(d−1)/2⌋, …, ⌊d/2⌋} carries v(k mod d), all other indices 0.
pub fn q_embed(v: &[Complex64], gamma: f64) -> Result<SampledSequence> {
    let d = v.len() as i64;
    if d == 0 {
        return Err(Error::invalid("cannot embed an empty vector"));
    }
    let offset = -((d - 1) / 2);
    let coeffs = (offset..=d / 2)
        .map(|k| v[k.rem_euclid(d) as usize])
        .collect();
    SampledSequence::new(gamma, offset, coeffs)
}

/// Output of Q_{γℤ} Q^{γℤ}_d P_{√d ℤ} R_{γℤ} with γ = d^{-1/2}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub window: Window,
    pub d: usize,
    pub gamma: f64,
    /// The intermediate vector in ℂ^d.
    pub vector: Vec<Complex64>,
    /// ℓ¹ mass dropped by the restriction. It bounds the sup-norm error of the
    /// output against the untruncated pipeline.
    pub tail_bound: f64,
}

pub fn approx_pipeline(g: &Window, d: usize) -> Result<PipelineOutput> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    let gamma = 1.0 / (d as f64).sqrt();
    let s = restrict(g, gamma, EPS_TAIL)?;
    let vector = s.periodize(d)?;
    let window = q_interp(&q_embed(&vector, gamma)?)?;
    Ok(PipelineOutput {
        window,
        d,
        gamma,
        vector,
        tail_bound: s.tail_bound,
    })
}

/// g − k, collapsed to a single piecewise polynomial when both are.
pub fn difference(g: &Window, k: &Window) -> Window {
    let w = Window::sum(vec![g.clone(), k.clone().scaled(Complex64::new(-1.0, 0.0))]);
    match w.to_piecewise_poly() {
        Some(p) => Window::PiecewisePoly(p),
        None => w,
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DistanceOptions {
    /// Frequency radius of the Janssen box for compactly supported windows.
    pub freq_radius: i64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            freq_radius: DISTANCE_FREQ_RADIUS,
        }
    }
}

/// Janssen box for a tuple: adaptive for Gaussians, all nonzero time columns and
/// a fixed frequency radius for compact windows.
fn janssen_opts(ws: &[Window], adjoint: &LatticeR2, freq_radius: i64) -> JanssenOptions {
    let mut opts = JanssenOptions::default();
    if ws.iter().all(|w| w.support().is_some()) {
        let len = ws
            .iter()
            .filter_map(|w| w.support())
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max);
        let r1 = (len / adjoint.generator[0][0]).ceil() as i64 + 1;
        opts.radius = Some([r1, freq_radius]);
    }
    opts
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProxyValue {
    pub d: usize,
    /// ‖(f̃_j)‖² of the chain-transferred differences, B-side realization.
    pub value: f64,
}

/// Bounds on ‖(g_j) − (k_j)‖²_Λ.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModuleDistance {
    /// (1/s(Λ)) Σ_j Σ_{λ°} |⟨f_j, π(λ°)* f_j⟩| with f = g − k, tail included.
    pub upper: f64,
    pub box_sum: f64,
    /// Certified bound for the part of the sum outside the box.
    pub tail: f64,
    pub proxy: Option<ProxyValue>,
}

pub fn module_distance(
    gs: &[Window],
    ks: &[Window],
    lambda: &RationalLattice,
    proxy: Option<&ChainParams>,
    opts: &DistanceOptions,
) -> Result<ModuleDistance> {
    if gs.len() != ks.len() || gs.is_empty() {
        return Err(Error::invalid(
            "tuples must be nonempty and of equal length",
        ));
    }
    let fs: Vec<Window> = gs.iter().zip(ks).map(|(g, k)| difference(g, k)).collect();
    let adj = lambda.adjoint().to_f64();
    let weight = 1.0 / rational::to_f64(lambda.covolume());
    let b = janssen_coefficients(
        &fs,
        &adj,
        weight,
        &janssen_opts(&fs, &adj, opts.freq_radius),
    )?;
    let proxy = match proxy {
        Some(p) => {
            let (vs, target) = chain_transfer(&fs, p)?;
            let m = algebra::module_norm_right(&vs, &target)?;
            Some(ProxyValue {
                d: p.validate()?,
                value: m * m,
            })
        }
        None => None,
    };
    Ok(ModuleDistance {
        upper: b.norm1(),
        box_sum: b.truncated_norm1(),
        tail: b.tail_norm1(),
        proxy,
    })
}

/// Chain constants for Λ = αℤ × βℤ with a = pk, M = qk, b = pk, N = qk where
/// αβ = p/q, and k the smallest with d = pqk² ≥ min_d.
pub fn proxy_params(alpha: Rational, beta: Rational, min_d: usize) -> Result<ChainParams> {
    let theta = alpha * beta;
    let (p, q) = (*theta.numer(), *theta.denom());
    if p <= 0 {
        return Err(Error::invalid("αβ must be positive"));
    }
    let mut k = 1i64;
    while p * q * k * k < min_d as i64 {
        k += 1;
    }
    let params = ChainParams {
        alpha,
        beta,
        a: p * k,
        b: p * k,
        m: q * k,
        n: q * k,
    };
    params.validate()?;
    Ok(params)
}

/// One row of a convergence sweep. The first five fields follow the CSV schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub d: usize,
    #[serde(rename = "distance_upper")]
    pub module_distance_upper: f64,
    pub proxy_opnorm: Option<f64>,
    /// Iterations of the Neumann series for ⟨k, k⟩_{Λ°}; empty when it was not applicable.
    pub neumann_iters: Option<usize>,
    pub wall_ms: f64,
    /// Tail part of `distance_upper`.
    pub distance_tail: f64,
    pub proxy_dim: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepOptions {
    pub distance: DistanceOptions,
    /// Proxy dimension d' ≥ proxy_factor · max d; no proxy when zero.
    pub proxy_factor: usize,
    /// Frequency radius of the box in which ⟨k, k⟩_{Λ°} is inverted.
    pub neumann_freq_radius: i64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            distance: DistanceOptions::default(),
            proxy_factor: 4,
            neumann_freq_radius: BESSEL_FREQ_RADIUS,
        }
    }
}

fn sweep_row(
    tuple: &[Window],
    lambda: &RationalLattice,
    d: usize,
    proxy: Option<&ChainParams>,
    opts: &SweepOptions,
) -> Result<ConvergenceRow> {
    let t0 = Instant::now();
    let ks = tuple
        .iter()
        .map(|g| approx_pipeline(g, d).map(|p| p.window))
        .collect::<Result<Vec<_>>>()?;
    let dist = module_distance(tuple, &ks, lambda, proxy, &opts.distance)?;
    let adj = lambda.adjoint().to_f64();
    let weight = 1.0 / rational::to_f64(lambda.covolume());
    let b = janssen_coefficients(
        &ks,
        &adj,
        weight,
        &janssen_opts(&ks, &adj, opts.neumann_freq_radius),
    )?;
    let neumann_iters = match neumann_inverse(&b, NEUMANN_TOL, NEUMANN_MAX_ITER) {
        Ok(r) => Some(r.iterations),
        Err(e) if e.is_numerical() => None,
        Err(e) => return Err(e),
    };
    Ok(ConvergenceRow {
        d,
        module_distance_upper: dist.upper,
        proxy_opnorm: dist.proxy.map(|p| p.value),
        neumann_iters,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        distance_tail: dist.tail,
        proxy_dim: dist.proxy.map(|p| p.d),
        error: None,
    })
}

/// Runs the pipeline on every window of the dual pair ((g_j), (h_j)) for each d
/// and reports the module-norm distance of the 2n-tuple to its approximation.
/// Rows are independent; a failing row is recorded and the sweep continues.
pub fn convergence_sweep(
    gs: &[Window],
    hs: &[Window],
    lambda: &RationalLattice,
    d_list: &[usize],
    opts: &SweepOptions,
) -> Result<Vec<ConvergenceRow>> {
    if d_list.is_empty() || d_list.windows(2).any(|w| w[1] <= w[0]) || d_list[0] == 0 {
        return Err(Error::invalid(
            "d_list must be positive and strictly increasing",
        ));
    }
    let (wr, _) = real_wr_residual(gs, hs, lambda, DUALITY_RADIUS)?;
    if wr > REAL_DUAL_TOL {
        return Err(Error::PreconditionViolation(format!(
            "inputs are not dual on ℝ (WR residual {wr:e})"
        )));
    }
    let tuple: Vec<Window> = gs.iter().chain(hs).cloned().collect();
    let h = lambda.hermite().generator;
    let proxy = if opts.proxy_factor > 0 && h[0][1].is_zero() {
        let max_d = *d_list.last().expect("nonempty");
        Some(proxy_params(
            h[0][0],
            h[1][1].abs(),
            opts.proxy_factor * max_d,
        )?)
    } else {
        None
    };
    Ok(d_list
        .par_iter()
        .map(|&d| {
            sweep_row(&tuple, lambda, d, proxy.as_ref(), opts).unwrap_or_else(|e| ConvergenceRow {
                d,
                module_distance_upper: f64::NAN,
                proxy_opnorm: None,
                neumann_iters: None,
                wall_ms: 0.0,
                distance_tail: f64::NAN,
                proxy_dim: None,
                error: Some(e.to_string()),
            })
        })
        .collect())
}

/// Convergents p/q of the continued fraction of x > 0, the first `count` of them.
pub fn convergents(x: f64, count: usize) -> Vec<Rational> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = y.floor();
        let Some(ai) = a.to_i64() else { break };
        let (p, q) = (ai * p1 + p0, ai * q1 + q0);
        out.push(Rational::new(p, q));
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = y - a;
        if frac < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalStepReport {
    pub theta: f64,
    #[serde(with = "rational::as_object")]
    pub theta_tilde: Rational,
    /// Box radius of the coefficient arrays, in lattice coordinates.
    pub radius: i64,
    /// Neumann inversion of ⟨g, g⟩ over Λ°_θ, the frame certificate at θ.
    pub reference: NeumannSummary,
    /// Neumann series for 1 − c·b̃, with c the inverse at θ carried over to θ̃.
    pub perturbation: NeumannSummary,
    pub wr_residual: f64,
    pub wr_quadrature_error: f64,
}

/// Dual tuple (g_j)·b̃⁻¹ for Λ_θ̃ = ℤ × θ̃ℤ, starting from a frame at Λ_θ.
///
/// b = ⟨g, g⟩ over Λ°_θ is inverted first. Its inverse c, read as a series in
/// the generators of the torus, is carried over to Λ°_θ̃, and b̃⁻¹ is expanded
/// as Σ_k (1 − c b̃)^k c. That series converging is how "θ̃ close to θ" is
/// decided: ‖1 − c b̃‖₁ ≥ 1 gives ThetaTooFar, even if b̃ happens to be
/// invertible by other means.
pub fn rational_step(
    gs: &[Window],
    theta: f64,
    theta_tilde: Rational,
) -> Result<(Vec<Window>, RationalStepReport)> {
    if gs.is_empty() {
        return Err(Error::invalid("at least one window is required"));
    }
    if !(theta > 0.0 && theta.is_finite()) || theta_tilde <= Rational::from_integer(0) {
        return Err(Error::invalid("θ and θ̃ must be positive"));
    }
    let tt = rational::to_f64(theta_tilde);
    let adj = LatticeR2::separable(1.0 / theta, 1.0)?;
    let adj_t = LatticeR2::separable(1.0 / tt, 1.0)?;
    let (w, w_t) = (1.0 / theta, 1.0 / tt);
    let r = janssen_coefficients(gs, &adj, w, &JanssenOptions::default())?.radius[0];
    let r_t = janssen_coefficients(gs, &adj_t, w_t, &JanssenOptions::default())?.radius[0];
    // The inverses decay more slowly than b; leave room beyond the adaptive box.
    let radius = 2 * r.max(r_t) + 4;
    let box_opts = JanssenOptions::with_radius([radius; 2]);
    let b = janssen_coefficients(gs, &adj, w, &box_opts)?;
    let reference = neumann_inverse(&b, NEUMANN_TOL, NEUMANN_MAX_ITER)
        .map_err(|e| Error::NotAFrame(format!("no Neumann certificate at θ = {theta}: {e}")))?;
    let c: LatticeElement = reference.inverse.transport(adj_t, w_t);
    let b_t = janssen_coefficients(gs, &adj_t, w_t, &box_opts)?;
    let p = c.mul(&b_t)?;
    let pert =
        match neumann_inverse_around(&p, Complex64::new(1.0, 0.0), NEUMANN_TOL, NEUMANN_MAX_ITER) {
            Ok(r) => r,
            Err(Error::NotDiagonallyDominant { norm }) => return Err(Error::ThetaTooFar { norm }),
            Err(e) => return Err(e),
        };
    let inv = pert.inverse.mul(&c)?;
    let hs: Vec<Window> = gs.iter().map(|g| right_action(g, &inv)).collect();
    let lt = RationalLattice::separable(Rational::from_integer(1), theta_tilde)?;
    let (wr, qerr) = real_wr_residual(gs, &hs, &lt, DUALITY_RADIUS)?;
    let report = RationalStepReport {
        theta,
        theta_tilde,
        radius,
        reference: reference.summary(),
        perturbation: pert.summary(),
        wr_residual: wr,
        wr_quadrature_error: qerr,
    };
    Ok((hs, report))
}

#[cfg(test)]
mod tests;
