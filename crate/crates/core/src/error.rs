use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures surfaced by the laboratory.
///
/// Conditions the operations report without aborting (non-convergence,
/// parameters outside an asymptotic regime, unverifiable class promises,
/// Lanczos breakdown) travel as flags on the returned values instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("right-hand side has zero norm")]
    ZeroRhs,

    #[error("operator failed the symmetry probe: defect {defect:.3e} exceeds bound {bound:.3e}")]
    SymmetryViolation { defect: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence after {steps} steps: relative residual {residual:.3e}")]
    NotConverged { steps: usize, residual: f64 },

    #[error("class membership was promised by the caller and cannot be checked from products")]
    ClassPromiseUnchecked,

    #[error("no cardinality formula for matrix class {0}")]
    UnsupportedClass(String),

    #[error("p*r = {pr} does not exceed d = {d}: the worst-case problem is unsolvable")]
    UnsolvableClass { pr: f64, d: u32 },

    #[error("Krylov span of dimension {n} fills the whole space; no orthogonal direction exists")]
    FullKrylov { n: usize },

    #[error("matrix market input, line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attaches the experiment cell or command that produced the error.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by the caller's input rather than by a run.
    pub fn is_invalid_input(&self) -> bool {
        match self {
            Error::Context { source, .. } => source.is_invalid_input(),
            Error::ZeroRhs
            | Error::SymmetryViolation { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::UnsupportedClass(_)
            | Error::UnsolvableClass { .. }
            | Error::FullKrylov { .. }
            | Error::MatrixMarket { .. }
            | Error::InvalidSpec(_)
            | Error::Io(_)
            | Error::Json(_) => true,
            Error::NotConverged { .. } | Error::ClassPromiseUnchecked | Error::Csv(_) => false,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
