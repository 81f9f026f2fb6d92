//! Named experiment presets, one per worked example.

use heisenberg_core::continuous::Window;
use heisenberg_core::rational::ratio;
use heisenberg_core::transfer::real::{ChainParams, ProductParams, ShearedParams};
use heisenberg_core::transfer::Mode;
use heisenberg_core::{Error, Result};

use crate::config::{
    CommandKind, ExperimentConfig, LatticeSpec, PhaseLabel, Tolerances, WindowSpec, Q,
};

pub const NAMES: &[&str] = &[
    "finite-separable",
    "strip-violation",
    "triangle-2-5",
    "theta-1-2",
    "sheared",
    "product",
    "gaussian-1-2",
    "irrational-theta",
];

fn label(x: i64, omega: i64) -> PhaseLabel {
    PhaseLabel {
        x: vec![x],
        omega: vec![omega],
    }
}

/// ℤ₁₀ with Λ = 2ℤ₅×2ℤ₅, so s(Λ) = 2/5.
fn finite_separable() -> ExperimentConfig {
    ExperimentConfig {
        group: Some(vec![10]),
        lattice: Some(LatticeSpec::Finite {
            generators: vec![label(2, 0), label(0, 2)],
        }),
        ..Default::default()
    }
}

fn continuous(g: Window) -> WindowSpec {
    WindowSpec::Continuous {
        g: vec![g],
        h: None,
    }
}

/// Tolerance for results that carry quadrature and truncation certificates.
fn certified() -> Tolerances {
    Tolerances {
        tol_wr: 1e-8,
        ..Default::default()
    }
}

/// Transfer presets depend on the mode: sampling keeps the even times, and
/// periodization by {0, 5} keeps Λ inside G×H^⊥.
pub fn transfer_preset(mode: Mode, name: &str) -> Result<ExperimentConfig> {
    let mut cfg = match name {
        "finite-separable" => {
            let h = match mode {
                Mode::Sample => 2,
                _ => 5,
            };
            ExperimentConfig {
                subgroup: Some(vec![vec![h]]),
                ..finite_separable()
            }
        }
        // (1, 0) leaves H×Ĝ for H = 2ℤ₅ and (0, 2) leaves G×H^⊥.
        "strip-violation" => ExperimentConfig {
            group: Some(vec![10]),
            lattice: Some(LatticeSpec::Finite {
                generators: vec![label(1, 0), label(0, 2)],
            }),
            subgroup: Some(vec![vec![2]]),
            ..Default::default()
        },
        _ => {
            return Err(Error::invalid(format!(
                "no transfer preset `{name}`; use finite-separable or strip-violation"
            )))
        }
    };
    cfg.command = Some(CommandKind::Transfer);
    Ok(cfg)
}

/// The preset `name` as seen by `command`.
pub fn preset(command: CommandKind, name: &str) -> Result<ExperimentConfig> {
    use CommandKind::*;
    let mut cfg = match (command, name) {
        (FiniteVerify | Norms | NcMul | ProjectionCheck | Dual, "finite-separable") => {
            finite_separable()
        }
        (Chain | Dual | Approx, "triangle-2-5") => ExperimentConfig {
            lattice: Some(LatticeSpec::Chain(ChainParams::theta_2_5())),
            windows: continuous(Window::triangle(1.0)),
            tolerances: certified(),
            ..Default::default()
        },
        (Chain, "theta-1-2") => ExperimentConfig {
            lattice: Some(LatticeSpec::Chain(ChainParams {
                alpha: ratio(1, 1),
                beta: ratio(1, 2),
                a: 1,
                b: 1,
                m: 2,
                n: 2,
            })),
            windows: continuous(Window::triangle(1.0)),
            tolerances: certified(),
            ..Default::default()
        },
        (Chain, "sheared") => ExperimentConfig {
            lattice: Some(LatticeSpec::Sheared(ShearedParams::preset())),
            windows: continuous(Window::gaussian(0.0, 1.0)),
            tolerances: certified(),
            ..Default::default()
        },
        (Chain, "product") => ExperimentConfig {
            lattice: Some(LatticeSpec::Product(ProductParams::preset())),
            ..Default::default()
        },
        (Dual, "gaussian-1-2") => ExperimentConfig {
            lattice: Some(LatticeSpec::Real {
                matrix: [
                    [Q(ratio(1, 1)), Q(ratio(0, 1))],
                    [Q(ratio(0, 1)), Q(ratio(1, 2))],
                ],
            }),
            windows: continuous(Window::gaussian(0.0, 1.0)),
            tolerances: certified(),
            ..Default::default()
        },
        (Approx, "irrational-theta") => ExperimentConfig {
            windows: continuous(Window::gaussian(0.0, 1.0)),
            tolerances: Tolerances {
                tol_wr: 1e-6,
                ..Default::default()
            },
            ..Default::default()
        },
        _ => {
            return Err(Error::invalid(format!(
                "no preset `{name}` for this command; presets are {}",
                NAMES.join(", ")
            )))
        }
    };
    cfg.command = Some(command);
    Ok(cfg)
}
