use thiserror::Error;

/// Which theorem hypothesis failed. Kept separate from the message so the CLI
/// can report it in machine-readable form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// Λ lies in H×Ĝ (sampling) or G×H^⊥ (periodization).
    LatticeInStrip,
    /// The embedded adjoint of the target lattice lies in Λ°.
    AdjointEmbeds,
    /// The strengthened set equality used for canonical-dual preservation.
    AdjointMatchesStrip,
}

impl Hypothesis {
    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::LatticeInStrip => "(i)",
            Hypothesis::AdjointEmbeds => "(ii)",
            Hypothesis::AdjointMatchesStrip => "(ii*)",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis {} violated: {detail}", .which.label())]
    HypothesisViolation { which: Hypothesis, detail: String },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("system is not a frame: {0}")]
    NotAFrame(String),
    #[error("painless precondition violated: {0}")]
    PainlessPrecondition(String),
    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    Truncation { tail: f64, tol: f64 },
    #[error("quadrature did not reach {tol:e} (estimate {estimate:e})")]
    Quadrature { estimate: f64, tol: f64 },
    #[error("element is not diagonally dominant: |e|_1 = {norm}")]
    NotDiagonallyDominant { norm: f64 },
    #[error("theta~ too far from theta: |e|_1 = {norm}")]
    ThetaTooFar { norm: f64 },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerics rather than of the mathematics.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::Quadrature { .. }
                | Error::NotDiagonallyDominant { .. }
                | Error::ThetaTooFar { .. }
                | Error::NotAFrame(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
