//! Frame operators, frame bounds, canonical duals and Wexler–Raz checks for
//! multi-window Gabor systems over finite phase-space subgroups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::rational::{self, Rational};
use crate::timefreq::{inner, PhaseSubgroup};

/// A frame is declared when A_opt > FRAME_RATIO · B_opt.
pub const FRAME_RATIO: f64 = 1e-9;
pub const CG_TOL: f64 = 1e-12;
/// Slack allowed in each inequality of the bound chain.
pub const CHAIN_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameReport {
    #[serde(rename = "A_opt")]
    pub a_opt: f64,
    #[serde(rename = "B_opt")]
    pub b_opt: f64,
    pub bessel_b: f64,
    pub wr_residual: Option<f64>,
    pub is_frame: bool,
    #[serde(with = "rational::as_object")]
    pub s_lambda: Rational,
}

fn check_windows(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<()> {
    let n = lambda.domain().n();
    if gs.is_empty() {
        return Err(Error::invalid("at least one window is required"));
    }
    if gs.iter().any(|g| g.len() != n) {
        return Err(Error::invalid("windows must live on the lattice domain"));
    }
    Ok(())
}

/// S = Σ_j Σ_λ ⟨·, π(λ)g_j⟩ π(λ)g_j as a dense matrix.
pub fn frame_operator(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<CMatrix> {
    check_windows(gs, lambda)?;
    let d = lambda.domain();
    let n = d.n();
    let mut s = CMatrix::zeros(n, n);
    for g in gs {
        for &p in lambda.points() {
            let v = d.tf_shift(p, g)?;
            for i in 0..n {
                if v[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    s[(i, k)] += v[i] * v[k].conj();
                }
            }
        }
    }
    Ok(s)
}

/// Σ_j ⟨g_j, g_j⟩_{Λ°}, the Janssen form of S.
pub fn frame_operator_janssen(
    gs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<AlgebraElement> {
    check_windows(gs, lambda)?;
    let m = algebra::matrix_inner_right(gs, gs, lambda)?;
    Ok(m.entry(0, 0).clone())
}

/// (A_opt, B_opt): extreme eigenvalues of S.
pub fn frame_bounds(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<(f64, f64)> {
    let s = frame_operator_janssen(gs, lambda)?.realize();
    let ev = linalg::hermitian_eigenvalues(&s);
    Ok((ev[0].max(0.0), ev[ev.len() - 1].max(0.0)))
}

pub fn is_frame_bounds(a: f64, b: f64) -> bool {
    b > 0.0 && a > FRAME_RATIO * b
}

/// h_j = S^{-1} g_j, by conjugate gradients on the Janssen form, cross-checked
/// against an LU solve for small domains.
pub fn canonical_dual(
    gs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<Vec<Vec<Complex64>>> {
    let b = frame_operator_janssen(gs, lambda)?;
    let n = lambda.domain().n();
    let s = b.realize();
    let ev = linalg::hermitian_eigenvalues(&s);
    let (a_opt, b_opt) = (ev[0], ev[n - 1]);
    if !is_frame_bounds(a_opt, b_opt) {
        return Err(Error::NotAFrame(format!(
            "A_opt = {a_opt:e}, B_opt = {b_opt:e}"
        )));
    }
    let max_iter = 10 * n + 100;
    gs.iter()
        .map(|g| {
            let (x, res) =
                linalg::conjugate_gradient(|v| linalg::mat_vec(&s, v), g, CG_TOL, max_iter);
            if n <= linalg::DENSE_EIGEN_LIMIT {
                let y = linalg::solve(&s, g)?;
                let scale = crate::timefreq::norm2(&y).max(1e-300);
                let gap = crate::timefreq::norm2(
                    &x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>(),
                ) / scale;
                // CG can stall on badly conditioned frames; the direct solve is then authoritative.
                if res > 1e-10 || gap > 1e-8 {
                    return Ok(y);
                }
            }
            Ok(x)
        })
        .collect()
}

/// max over λ° ∈ Λ° of |Σ_j ⟨h_j, π(λ°)* g_j⟩ − s(Λ) δ_{λ°,0}|.
pub fn wexler_raz_residual(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<f64> {
    wexler_raz_residual_on(gs, hs, &lambda.adjoint(), lambda.covolume())
}

/// As `wexler_raz_residual` with Λ° and s(Λ) supplied.
pub fn wexler_raz_residual_on(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    adjoint: &PhaseSubgroup,
    s_lambda: Rational,
) -> Result<f64> {
    check_windows(gs, adjoint)?;
    check_windows(hs, adjoint)?;
    if gs.len() != hs.len() {
        return Err(Error::invalid("dual tuples must have equal length"));
    }
    let d = adjoint.domain();
    let s = rational::to_f64(s_lambda);
    let mut worst: f64 = 0.0;
    for &p in adjoint.points() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (g, h) in gs.iter().zip(hs) {
            acc += inner(h, &d.tf_shift_adjoint_unchecked(p, g));
        }
        if p == 0 {
            acc -= s;
        }
        worst = worst.max(acc.norm());
    }
    Ok(worst)
}

/// ‖f − Σ_j ⟨f, g_j⟩_Λ · h_j‖ / ‖f‖.
pub fn reconstruction_residual(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
    f: &[Complex64],
) -> Result<f64> {
    let mut out = linalg::zeros(f.len());
    for (g, h) in gs.iter().zip(hs) {
        let a = algebra::inner_left(f, g, lambda)?;
        for (o, v) in out.iter_mut().zip(a.act(h)?) {
            *o += v;
        }
    }
    let diff: Vec<Complex64> = out.iter().zip(f).map(|(a, b)| a - b).collect();
    Ok(crate::timefreq::norm2(&diff) / crate::timefreq::norm2(f).max(1e-300))
}

/// B((g_j),Λ) = (1/s(Λ)) Σ_j Σ_{λ°} |⟨g_j, π(λ°)* g_j⟩|.
pub fn bessel_constant(gs: &[Vec<Complex64>], lambda: &PhaseSubgroup) -> Result<f64> {
    check_windows(gs, lambda)?;
    let adjoint = lambda.adjoint();
    let w = lambda.covolume().recip();
    gs.iter()
        .map(|g| Ok(algebra::inner_right_on(g, g, &adjoint, w)?.norm1()))
        .sum()
}

/// Relative distance of each h_j from span{π(λ°)* g_k : λ° ∈ Λ°, k}.
pub fn span_residual(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<f64> {
    let adjoint = lambda.adjoint();
    let d = adjoint.domain();
    let mut columns = Vec::new();
    for g in gs {
        for &p in adjoint.points() {
            columns.push(d.tf_shift_adjoint(p, g)?);
        }
    }
    Ok(hs
        .iter()
        .map(|h| linalg::span_residual(&columns, h))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundChain {
    pub inv_bessel_h: f64,
    pub a_opt: f64,
    pub b_opt: f64,
    pub module_norm_sq: f64,
    pub bessel_g: f64,
    pub slack: f64,
    pub holds: bool,
}

impl BoundChain {
    /// Checks B_h^{-1} ≤ A_opt ≤ B_opt = ‖g‖² ≤ B_g, each with relative slack.
    pub fn evaluate(
        inv_bessel_h: f64,
        a_opt: f64,
        b_opt: f64,
        module_norm_sq: f64,
        bessel_g: f64,
        slack: f64,
    ) -> Self {
        let scale = bessel_g.abs().max(1.0);
        let le = |x: f64, y: f64| x <= y + slack * scale;
        let holds = le(inv_bessel_h, a_opt)
            && le(a_opt, b_opt)
            && (b_opt - module_norm_sq).abs() <= slack * scale
            && le(b_opt, bessel_g);
        BoundChain {
            inv_bessel_h,
            a_opt,
            b_opt,
            module_norm_sq,
            bessel_g,
            slack,
            holds,
        }
    }
}

/// The chain of frame-bound inequalities for a dual pair.
pub fn frame_bound_sandwich(
    gs: &[Vec<Complex64>],
    hs: &[Vec<Complex64>],
    lambda: &PhaseSubgroup,
) -> Result<BoundChain> {
    let wr = wexler_raz_residual(gs, hs, lambda)?;
    if wr > 1e-8 {
        return Err(Error::PreconditionViolation(format!(
            "windows are not dual (WR residual {wr:e})"
        )));
    }
    let (a, b) = frame_bounds(gs, lambda)?;
    let m = algebra::module_norm(gs, lambda)?;
    let bh = bessel_constant(hs, lambda)?;
    let bg = bessel_constant(gs, lambda)?;
    Ok(BoundChain::evaluate(1.0 / bh, a, b, m * m, bg, CHAIN_SLACK))
}

/// FrameReport for (g_j), with the WR residual of (g_j),(h_j) when a dual is given.
pub fn frame_report(
    gs: &[Vec<Complex64>],
    hs: Option<&[Vec<Complex64>]>,
    lambda: &PhaseSubgroup,
) -> Result<FrameReport> {
    let (a, b) = frame_bounds(gs, lambda)?;
    let wr = hs
        .map(|hs| wexler_raz_residual(gs, hs, lambda))
        .transpose()?;
    Ok(FrameReport {
        a_opt: a,
        b_opt: b,
        bessel_b: bessel_constant(gs, lambda)?,
        wr_residual: wr,
        is_frame: is_frame_bounds(a, b),
        s_lambda: lambda.covolume(),
    })
}
