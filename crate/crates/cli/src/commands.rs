//! One runner per subcommand. Each returns a serializable result and whether
//! the numbers met the configured tolerances.

use heisenberg_core::algebra::{
    is_projection, matrix_inner_left, module_norm, module_norm_right, AlgebraElement,
    ProjectionReport, Side,
};
use heisenberg_core::approx::{
    convergence_sweep, rational_step, ConvergenceRow, RationalStepReport, SweepOptions,
};
use heisenberg_core::continuous::{painless_dual, Window};
use heisenberg_core::frames::{
    bessel_constant, canonical_dual, frame_bound_sandwich, frame_bounds, frame_report,
    reconstruction_residual, span_residual, BoundChain, FrameReport,
};
use heisenberg_core::lca::{FiniteAbelianGroup, GroupSpec};
use heisenberg_core::linalg::{self, max_entry_diff};
use heisenberg_core::rational::{self, Rational};
use heisenberg_core::timefreq::PhaseSubgroup;
use heisenberg_core::transfer::real::{
    chain_r_to_zd, neumann_dual, real_wr_residual, sheared_sampling, ChainOptions, ChainParams,
    ProductChecks, RationalLattice, StageOneReport, DUALITY_RADIUS,
};
use heisenberg_core::transfer::{self, default_target, target_domain, Mode, TransferReport};
use heisenberg_core::{Complex64, Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{labels_to_subgroup, ExperimentConfig, LatticeSpec, Q};

/// Neumann tolerance for duals on ℝ.
const REAL_NEUMANN_TOL: f64 = 1e-14;
/// Random elements per side in `nc-mul`.
const NC_TRIALS: usize = 16;
/// Idempotence residual above which the negative control counts as failing.
const CONTROL_GAP: f64 = 1e-3;

pub struct Outcome {
    pub result: serde_json::Value,
    pub passed: bool,
}

fn outcome<T: Serialize>(result: &T, passed: bool) -> Result<Outcome> {
    let result = serde_json::to_value(result)
        .map_err(|e| Error::invalid(format!("serializing result: {e}")))?;
    Ok(Outcome { result, passed })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

struct FiniteSetup {
    group: FiniteAbelianGroup,
    lambda: PhaseSubgroup,
    gs: Vec<Vec<Complex64>>,
    hs: Option<Vec<Vec<Complex64>>>,
    rng: ChaCha8Rng,
}

fn finite_setup(cfg: &ExperimentConfig) -> Result<FiniteSetup> {
    let group = cfg.group()?;
    let lambda = cfg.finite_lattice(&group)?;
    let mut rng = cfg.rng();
    let (gs, hs) = cfg.finite_windows(group.cardinality(), &mut rng)?;
    Ok(FiniteSetup {
        group,
        lambda,
        gs,
        hs,
        rng,
    })
}

/// The given duals, or the canonical dual when (g_j) is a frame by `tol_eig`.
fn finite_duals(cfg: &ExperimentConfig, s: &FiniteSetup) -> Result<(Vec<Vec<Complex64>>, bool)> {
    if let Some(hs) = &s.hs {
        return Ok((hs.clone(), false));
    }
    let (a, b) = frame_bounds(&s.gs, &s.lambda)?;
    if !(b > 0.0 && a > cfg.tolerances.tol_eig * b) {
        return Err(Error::NotAFrame(format!("A_opt = {a:e}, B_opt = {b:e}")));
    }
    Ok((canonical_dual(&s.gs, &s.lambda)?, true))
}

#[derive(Serialize)]
struct LatticeSummary {
    orders: Vec<usize>,
    size: usize,
    adjoint_size: usize,
    #[serde(with = "rational::as_object")]
    s_lambda: Rational,
}

fn summary(group: &FiniteAbelianGroup, lambda: &PhaseSubgroup) -> LatticeSummary {
    LatticeSummary {
        orders: group.orders().to_vec(),
        size: lambda.len(),
        adjoint_size: lambda.adjoint().len(),
        s_lambda: lambda.covolume(),
    }
}

#[derive(Serialize)]
struct FiniteVerifyResult {
    lattice: LatticeSummary,
    windows: usize,
    canonical: bool,
    frame: FrameReport,
    reconstruction_residual: f64,
    /// Distance of h_j from span{π(λ°)* g_k}; only meaningful for canonical duals.
    span_residual: Option<f64>,
    bound_chain: Option<BoundChain>,
    module_norm_a: f64,
    module_norm_b: f64,
    module_norm_gap: f64,
    duals: Vec<Vec<Complex64>>,
}

pub fn finite_verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut s = finite_setup(cfg)?;
    let (hs, canonical) = finite_duals(cfg, &s)?;
    let mut frame = frame_report(&s.gs, Some(&hs), &s.lambda)?;
    frame.is_frame = frame.b_opt > 0.0 && frame.a_opt > cfg.tolerances.tol_eig * frame.b_opt;
    let f = linalg::random_vector(&mut s.rng, s.group.cardinality());
    let recon = reconstruction_residual(&s.gs, &hs, &s.lambda, &f)?;
    let wr = frame.wr_residual.unwrap_or(f64::INFINITY);
    let chain = if wr < cfg.tolerances.tol_wr {
        Some(frame_bound_sandwich(&s.gs, &hs, &s.lambda)?)
    } else {
        None
    };
    let (ma, mb) = (
        module_norm(&s.gs, &s.lambda)?,
        module_norm_right(&s.gs, &s.lambda)?,
    );
    let passed = wr < cfg.tolerances.tol_wr
        && recon < cfg.tolerances.tol_wr
        && chain.as_ref().is_some_and(|c| c.holds);
    let r = FiniteVerifyResult {
        lattice: summary(&s.group, &s.lambda),
        windows: s.gs.len(),
        canonical,
        frame,
        reconstruction_residual: recon,
        span_residual: canonical
            .then(|| span_residual(&s.gs, &hs, &s.lambda))
            .transpose()?,
        bound_chain: chain,
        module_norm_a: ma,
        module_norm_b: mb,
        module_norm_gap: relative_gap(ma, mb),
        duals: hs,
    };
    outcome(&r, passed)
}

#[derive(Serialize)]
struct TransferResult {
    lattice: LatticeSummary,
    subgroup: GroupSpec,
    target_size: usize,
    report: TransferReport,
    windows_tilde: Vec<Vec<Complex64>>,
    duals_tilde: Vec<Vec<Complex64>>,
}

pub fn transfer(cfg: &ExperimentConfig, mode: Mode) -> Result<Outcome> {
    let s = finite_setup(cfg)?;
    let h = cfg.subgroup(&s.group)?;
    let small = target_domain(mode, &s.group, &h)?;
    let lambda_tilde = match &cfg.target {
        Some(labels) => labels_to_subgroup(&small, &s.group, labels)?,
        None => default_target(mode, &s.lambda, &h)?,
    };
    let (hs, _) = finite_duals(cfg, &s)?;
    let t = transfer::transfer_generators(mode, &s.lambda, &lambda_tilde, &s.gs, &hs)?;
    let passed = t.report.wr_residual_after < cfg.tolerances.tol_wr
        && t.report.bound_chain.as_ref().is_some_and(|c| c.holds)
        && t.report.canonical_preserved != Some(false);
    let r = TransferResult {
        lattice: summary(&s.group, &s.lambda),
        subgroup: GroupSpec::of(&h),
        target_size: lambda_tilde.len(),
        report: t.report,
        windows_tilde: t.gs,
        duals_tilde: t.hs,
    };
    outcome(&r, passed)
}

/// Duals on ℝ: painless when the lattice is separable and the window short
/// enough, a Neumann series otherwise.
fn real_duals(gs: &[Window], lattice: &RationalLattice) -> Result<(Vec<Window>, &'static str)> {
    let [[alpha, shear], [zero, beta]] = lattice.generator;
    let separable = shear == Rational::from_integer(0) && zero == Rational::from_integer(0);
    if separable && gs.len() == 1 {
        match painless_dual(&gs[0], rational::to_f64(alpha), rational::to_f64(beta)) {
            Ok(p) => return Ok((vec![p.h], "painless")),
            Err(Error::PainlessPrecondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let (hs, _) = neumann_dual(gs, &lattice.to_f64(), REAL_NEUMANN_TOL)?;
    Ok((hs, "neumann"))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ChainResult {
    Chain {
        params: ChainParams,
        d: usize,
        canonical: bool,
        dual_method: &'static str,
        stage_one: StageOneReport,
        lattice_size: usize,
        report: TransferReport,
        windows_tilde: Vec<Vec<Complex64>>,
        duals_tilde: Vec<Vec<Complex64>>,
    },
    Sheared {
        stage_one: StageOneReport,
    },
    Product {
        checks: ProductChecks,
    },
}

pub fn chain(cfg: &ExperimentConfig) -> Result<Outcome> {
    let tol = cfg.tolerances.tol_wr;
    match &cfg.lattice {
        Some(LatticeSpec::Chain(params)) => {
            let (gs, given) = cfg.continuous_windows()?;
            let canonical = given.is_none();
            let (hs, method) = match given {
                Some(hs) => (hs, "given"),
                None => real_duals(&gs, &params.lattice()?)?,
            };
            let out = chain_r_to_zd(&gs, &hs, params, &ChainOptions { canonical })?;
            let r = &out.report;
            let st = &out.stage_one.sampled;
            let passed = st.residual + st.tail_bound < tol
                && r.wr_residual_after + r.tail_bound < tol
                && r.bound_chain.as_ref().is_some_and(|c| c.holds)
                && r.canonical_preserved != Some(false);
            let res = ChainResult::Chain {
                params: *params,
                d: out.d,
                canonical,
                dual_method: method,
                stage_one: out.stage_one,
                lattice_size: out.lattice.len(),
                report: out.report,
                windows_tilde: out.gs,
                duals_tilde: out.hs,
            };
            outcome(&res, passed)
        }
        Some(LatticeSpec::Sheared(params)) => {
            let (gs, _) = cfg.continuous_windows()?;
            let stage_one = sheared_sampling(&gs[0], params)?;
            let passed = stage_one.sampled.residual + stage_one.sampled.tail_bound < tol;
            outcome(&ChainResult::Sheared { stage_one }, passed)
        }
        Some(LatticeSpec::Product(params)) => {
            let checks = params.check()?;
            checks.hypotheses.require("ℝ×ℤ_q preset")?;
            let passed = checks.adjoint_pairings_integral && checks.hypotheses.strengthened;
            outcome(&ChainResult::Product { checks }, passed)
        }
        _ => Err(Error::invalid(
            "chain needs a `chain`, `sheared` or `product` lattice",
        )),
    }
}

#[derive(Serialize)]
struct RealDualResult {
    method: &'static str,
    #[serde(with = "rational::as_object")]
    s_lambda: Rational,
    wr_residual: f64,
    wr_quadrature_error: f64,
    wr_radius: i64,
    duals: Vec<Window>,
}

#[derive(Serialize)]
struct FiniteDualResult {
    lattice: LatticeSummary,
    wr_residual: f64,
    duals: Vec<Vec<Complex64>>,
}

pub fn dual(cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(LatticeSpec::Finite { .. }) = &cfg.lattice {
        let s = finite_setup(cfg)?;
        let (hs, _) = finite_duals(cfg, &s)?;
        let wr = heisenberg_core::frames::wexler_raz_residual(&s.gs, &hs, &s.lambda)?;
        let r = FiniteDualResult {
            lattice: summary(&s.group, &s.lambda),
            wr_residual: wr,
            duals: hs,
        };
        return outcome(&r, wr < cfg.tolerances.tol_wr);
    }
    let lattice = cfg
        .lattice
        .as_ref()
        .ok_or_else(|| Error::invalid("config needs `lattice`"))?
        .real_lattice()?;
    let (gs, given) = cfg.continuous_windows()?;
    let (hs, method) = match given {
        Some(hs) => (hs, "given"),
        None => real_duals(&gs, &lattice)?,
    };
    let (wr, err) = real_wr_residual(&gs, &hs, &lattice, DUALITY_RADIUS)?;
    let r = RealDualResult {
        method,
        s_lambda: lattice.covolume(),
        wr_residual: wr,
        wr_quadrature_error: err,
        wr_radius: DUALITY_RADIUS,
        duals: hs,
    };
    outcome(&r, wr + err < cfg.tolerances.tol_wr)
}

#[derive(Serialize)]
struct NormsResult {
    lattice: LatticeSummary,
    module_norm_a: f64,
    module_norm_b: f64,
    #[serde(rename = "B_opt")]
    b_opt: f64,
    bessel_b: f64,
    /// Relative gap between the two realizations of the module norm.
    realization_gap: f64,
    /// Relative gap between ‖g‖² and B_opt.
    b_opt_gap: f64,
    slack: f64,
}

/// Relative agreement required of the module-norm identities.
pub const NORM_SLACK: f64 = 1e-8;

pub fn norms(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = finite_setup(cfg)?;
    let (ma, mb) = (
        module_norm(&s.gs, &s.lambda)?,
        module_norm_right(&s.gs, &s.lambda)?,
    );
    let (_, b_opt) = frame_bounds(&s.gs, &s.lambda)?;
    let bessel = bessel_constant(&s.gs, &s.lambda)?;
    let r = NormsResult {
        lattice: summary(&s.group, &s.lambda),
        module_norm_a: ma,
        module_norm_b: mb,
        b_opt,
        bessel_b: bessel,
        realization_gap: relative_gap(ma, mb),
        b_opt_gap: relative_gap(ma * ma, b_opt),
        slack: NORM_SLACK,
    };
    let passed = r.realization_gap <= NORM_SLACK
        && r.b_opt_gap <= NORM_SLACK
        && b_opt <= bessel * (1.0 + NORM_SLACK);
    outcome(&r, passed)
}

#[derive(Serialize, Default)]
pub struct SideResiduals {
    pub trials: usize,
    /// max ‖ρ(ab) − ρ(a)ρ(b)‖ over entries.
    pub product: f64,
    /// max ‖ρ(a*) − ρ(a)†‖ over entries.
    pub involution: f64,
    /// max ‖ab‖₁ / (‖a‖₁‖b‖₁).
    pub submultiplicativity: f64,
    /// max |a·f − ρ(a)f|.
    pub action: f64,
}

fn random_element(
    rng: &mut ChaCha8Rng,
    side: Side,
    support: &PhaseSubgroup,
    weight: Rational,
) -> Result<AlgebraElement> {
    let c = (0..support.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    AlgebraElement::new(side, support.clone(), c, weight)
}

/// Homomorphism residuals of the twisted algebra on one side.
pub fn side_residuals(
    rng: &mut ChaCha8Rng,
    side: Side,
    lambda: &PhaseSubgroup,
    trials: usize,
) -> Result<SideResiduals> {
    let (support, weight) = match side {
        Side::A => (lambda.clone(), Rational::from_integer(1)),
        Side::B => (lambda.adjoint(), lambda.covolume().recip()),
    };
    let n = lambda.domain().n();
    let mut r = SideResiduals {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let a = random_element(rng, side, &support, weight)?;
        let b = random_element(rng, side, &support, weight)?;
        let ab = a.mul(&b)?;
        let (ra, rb) = (a.realize(), b.realize());
        r.product = r.product.max(max_entry_diff(&ab.realize(), &(&ra * &rb)));
        r.involution = r
            .involution
            .max(max_entry_diff(&a.involution().realize(), &ra.adjoint()));
        r.submultiplicativity = r
            .submultiplicativity
            .max(ab.norm1() / (a.norm1() * b.norm1()).max(1e-300));
        let f = linalg::random_vector(rng, n);
        r.action = r.action.max(heisenberg_core::timefreq::max_abs_diff(
            &a.act(&f)?,
            &linalg::mat_vec(&ra, &f),
        ));
    }
    Ok(r)
}

#[derive(Serialize)]
struct NcMulResult {
    lattice: LatticeSummary,
    a_side: SideResiduals,
    b_side: SideResiduals,
    tolerance: f64,
}

/// Residual bound for the homomorphism identities.
pub const ALGEBRA_TOL: f64 = 1e-10;

pub fn nc_mul(cfg: &ExperimentConfig) -> Result<Outcome> {
    let group = cfg.group()?;
    let lambda = cfg.finite_lattice(&group)?;
    let mut rng = cfg.rng();
    let a = side_residuals(&mut rng, Side::A, &lambda, NC_TRIALS)?;
    let b = side_residuals(&mut rng, Side::B, &lambda, NC_TRIALS)?;
    let ok = |r: &SideResiduals| {
        r.product < ALGEBRA_TOL
            && r.involution < ALGEBRA_TOL
            && r.action < ALGEBRA_TOL
            && r.submultiplicativity <= 1.0 + 1e-12
    };
    let passed = ok(&a) && ok(&b);
    outcome(
        &NcMulResult {
            lattice: summary(&group, &lambda),
            a_side: a,
            b_side: b,
            tolerance: ALGEBRA_TOL,
        },
        passed,
    )
}

#[derive(Serialize)]
struct ProjectionResult {
    lattice: LatticeSummary,
    wr_residual: f64,
    projection: ProjectionReport,
    /// ⟨(g), (g)⟩ for a non-tight (g): must not be a projection.
    control: ProjectionReport,
    tolerance: f64,
}

/// Tolerance for idempotence and self-adjointness of p = ⟨(g), (h)⟩.
pub const PROJECTION_TOL: f64 = 1e-9;

pub fn projection_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let s = finite_setup(cfg)?;
    let (hs, _) = finite_duals(cfg, &s)?;
    let wr = heisenberg_core::frames::wexler_raz_residual(&s.gs, &hs, &s.lambda)?;
    let p = is_projection(&matrix_inner_left(&s.gs, &hs, &s.lambda)?, PROJECTION_TOL)?;
    let control = is_projection(&matrix_inner_left(&s.gs, &s.gs, &s.lambda)?, PROJECTION_TOL)?;
    let passed = p.is_projection && control.idempotent_residual > CONTROL_GAP;
    outcome(
        &ProjectionResult {
            lattice: summary(&s.group, &s.lambda),
            wr_residual: wr,
            projection: p,
            control,
            tolerance: PROJECTION_TOL,
        },
        passed,
    )
}

/// Rows of a convergence sweep; `timing` false blanks the wall-clock column.
pub fn sweep(
    cfg: &ExperimentConfig,
    d_list: &[usize],
    timing: bool,
) -> Result<(Vec<ConvergenceRow>, bool)> {
    let params = match &cfg.lattice {
        Some(LatticeSpec::Chain(p)) => *p,
        _ => return Err(Error::invalid("approx sweep needs a `chain` lattice")),
    };
    let lattice = RationalLattice::separable(params.alpha, params.beta)?;
    let (gs, given) = cfg.continuous_windows()?;
    let hs = match given {
        Some(hs) => hs,
        None => real_duals(&gs, &lattice)?.0,
    };
    let mut rows = convergence_sweep(&gs, &hs, &lattice, d_list, &SweepOptions::default())?;
    if !timing {
        for r in &mut rows {
            r.wall_ms = f64::NAN;
        }
    }
    let passed = rows.iter().all(|r| r.error.is_none());
    Ok((rows, passed))
}

#[derive(Serialize)]
pub struct StepRow {
    pub theta_tilde: Q,
    pub report: Option<RationalStepReport>,
    pub error: Option<String>,
    pub exit_code: i32,
}

/// One rational step per θ̃; failures are recorded per row.
pub fn rational_steps(
    cfg: &ExperimentConfig,
    theta: f64,
    tildes: &[Rational],
) -> Result<(Vec<StepRow>, i32)> {
    let (gs, _) = cfg.continuous_windows()?;
    let mut code = 0;
    let mut rows = Vec::new();
    for &tt in tildes {
        match rational_step(&gs, theta, tt) {
            Ok((_, report)) => {
                let c = if report.wr_residual + report.wr_quadrature_error < cfg.tolerances.tol_wr {
                    0
                } else {
                    crate::EXIT_NUMERICAL
                };
                code = code.max(c);
                rows.push(StepRow {
                    theta_tilde: Q(tt),
                    report: Some(report),
                    error: None,
                    exit_code: c,
                });
            }
            Err(e) => {
                let c = crate::exit_code(&e);
                if c == crate::EXIT_USAGE {
                    return Err(e);
                }
                code = code.max(c);
                rows.push(StepRow {
                    theta_tilde: Q(tt),
                    report: None,
                    error: Some(e.to_string()),
                    exit_code: c,
                });
            }
        }
    }
    Ok((rows, code))
}
