//! Experiment configuration files. Every field has a default so that presets
//! and hand-written JSON share one type; see the README for the schema.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use heisenberg_core::continuous::{Window, EPS_QUAD, EPS_TAIL};
use heisenberg_core::frames::FRAME_RATIO;
use heisenberg_core::lca::{subgroup_from_generators, FiniteAbelianGroup, Subgroup};
use heisenberg_core::rational::{self, Rational};
use heisenberg_core::timefreq::{Domain, LatticeR2, PhaseSubgroup};
use heisenberg_core::transfer::real::{ChainParams, ProductParams, RationalLattice, ShearedParams};
use heisenberg_core::{Complex64, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    FiniteVerify,
    Transfer,
    Chain,
    Dual,
    Norms,
    NcMul,
    ProjectionCheck,
    Approx,
    Reproduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol_wr")]
    pub tol_wr: f64,
    /// Frame threshold: a frame needs A_opt > tol_eig · B_opt.
    #[serde(default = "default_tol_eig")]
    pub tol_eig: f64,
    #[serde(default = "default_eps_quad")]
    pub eps_quad: f64,
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
}

fn default_tol_wr() -> f64 {
    1e-9
}
fn default_tol_eig() -> f64 {
    FRAME_RATIO
}
fn default_eps_quad() -> f64 {
    EPS_QUAD
}
fn default_eps_tail() -> f64 {
    EPS_TAIL
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_wr: default_tol_wr(),
            tol_eig: default_tol_eig(),
            eps_quad: default_eps_quad(),
            eps_tail: default_eps_tail(),
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_wr", self.tol_wr),
            ("tol_eig", self.tol_eig),
            ("eps_quad", self.eps_quad),
            ("eps_tail", self.eps_tail),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A phase-space point given by ambient labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseLabel {
    pub x: Vec<i64>,
    pub omega: Vec<i64>,
}

/// A rational in `{num, den}` form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "rational::as_object")] pub Rational);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeSpec {
    /// Λ ≤ G×Ĝ generated by the listed points.
    Finite {
        generators: Vec<PhaseLabel>,
    },
    /// Λ = Aℤ² in ℝ² with exact rational entries; columns are generators.
    Real {
        matrix: [[Q; 2]; 2],
    },
    Chain(ChainParams),
    Sheared(ShearedParams),
    Product(ProductParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    /// `count` windows with i.i.d. uniform entries in the unit square, from the seed.
    Random { count: usize },
    /// Vectors as lists of `[re, im]`; `h` defaults to the canonical dual.
    Explicit {
        g: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        h: Option<Vec<Vec<[f64; 2]>>>,
    },
    /// Windows on ℝ; `h` defaults to a computed dual.
    Continuous {
        g: Vec<Window>,
        #[serde(default)]
        h: Option<Vec<Window>>,
    },
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec::Random { count: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// When present it must name the subcommand that reads the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    /// Orders d₁, …, d_k of G = ℤ_{d₁}×…×ℤ_{d_k}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    /// Generators of H ≤ G for `transfer`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<Vec<i64>>>,
    /// Generators of Λ̃ on the target domain; the largest admissible Λ̃ otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<PhaseLabel>>,
    #[serde(default)]
    pub windows: WindowSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.tolerances.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn check_command(&self, kind: CommandKind) -> Result<()> {
        match self.command {
            Some(c) if c != kind => {
                Err(Error::invalid(format!("config is for {c:?}, not {kind:?}")))
            }
            _ => Ok(()),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        let orders = self
            .group
            .clone()
            .ok_or_else(|| Error::invalid("config needs `group`"))?;
        FiniteAbelianGroup::new(orders)
    }

    /// Λ on the full phase space of G.
    pub fn finite_lattice(&self, group: &FiniteAbelianGroup) -> Result<PhaseSubgroup> {
        match &self.lattice {
            Some(LatticeSpec::Finite { generators }) => {
                labels_to_subgroup(&Domain::full(group), group, generators)
            }
            _ => Err(Error::invalid("config needs a `finite` lattice")),
        }
    }

    pub fn subgroup(&self, group: &FiniteAbelianGroup) -> Result<Subgroup> {
        let gens = self
            .subgroup
            .as_ref()
            .ok_or_else(|| Error::invalid("config needs `subgroup`"))?;
        let gens = gens
            .iter()
            .map(|x| group.reduce(x))
            .collect::<Result<Vec<_>>>()?;
        subgroup_from_generators(group, &gens)
    }

    /// Windows on ℂ^n, drawn from the seed or read from the file.
    pub fn finite_windows(
        &self,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<Vec<Complex64>>, Option<Vec<Vec<Complex64>>>)> {
        match &self.windows {
            WindowSpec::Random { count } => {
                if *count == 0 {
                    return Err(Error::invalid("at least one window is required"));
                }
                Ok((
                    (0..*count)
                        .map(|_| heisenberg_core::linalg::random_vector(rng, n))
                        .collect(),
                    None,
                ))
            }
            WindowSpec::Explicit { g, h } => {
                let conv = |vs: &Vec<Vec<[f64; 2]>>| -> Result<Vec<Vec<Complex64>>> {
                    vs.iter()
                        .map(|v| {
                            if v.len() != n {
                                return Err(Error::invalid(format!(
                                    "window of length {} on a group of order {n}",
                                    v.len()
                                )));
                            }
                            Ok(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                        })
                        .collect()
                };
                Ok((conv(g)?, h.as_ref().map(conv).transpose()?))
            }
            WindowSpec::Continuous { .. } => Err(Error::invalid(
                "finite commands need `random` or `explicit` windows",
            )),
        }
    }

    pub fn continuous_windows(&self) -> Result<(Vec<Window>, Option<Vec<Window>>)> {
        match &self.windows {
            WindowSpec::Continuous { g, h } => {
                for w in g.iter().chain(h.iter().flatten()) {
                    w.validate()?;
                }
                if g.is_empty() || h.as_ref().is_some_and(|h| h.len() != g.len()) {
                    return Err(Error::invalid(
                        "need a nonempty window tuple and a dual tuple of the same length",
                    ));
                }
                Ok((g.clone(), h.clone()))
            }
            _ => Err(Error::invalid("this command needs `continuous` windows")),
        }
    }
}

pub fn labels_to_subgroup(
    domain: &Arc<Domain>,
    group: &FiniteAbelianGroup,
    labels: &[PhaseLabel],
) -> Result<PhaseSubgroup> {
    let gens = labels
        .iter()
        .map(|l| Ok((group.reduce(&l.x)?, group.reduce(&l.omega)?)))
        .collect::<Result<Vec<_>>>()?;
    PhaseSubgroup::from_labels(domain, &gens)
}

impl LatticeSpec {
    /// The lattice in ℝ² described by a real, chain or sheared spec.
    pub fn real_lattice(&self) -> Result<RationalLattice> {
        match self {
            LatticeSpec::Real { matrix } => RationalLattice::new([
                [matrix[0][0].0, matrix[0][1].0],
                [matrix[1][0].0, matrix[1][1].0],
            ]),
            LatticeSpec::Chain(p) => p.lattice(),
            LatticeSpec::Sheared(p) => p.lattice(),
            _ => Err(Error::invalid("expected a lattice in ℝ²")),
        }
    }

    pub fn real_lattice_f64(&self) -> Result<LatticeR2> {
        Ok(self.real_lattice()?.to_f64())
    }
}
