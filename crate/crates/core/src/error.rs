use thiserror::Error;

/// Errors raised by every numerical routine in the crate.
///
/// The CLI maps `Domain`, `Index`, `Precondition`, `Shape`, `Config` and
/// `Data` to validation failures (exit code 1); the remaining variants are
/// numerical failures (exit code 2).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {what} exceeds threshold {threshold:e}")]
    Overflow { what: String, threshold: f64 },
    #[error("accuracy error: {what} (achieved error estimate {estimate:e})")]
    Accuracy { what: String, estimate: f64 },
    #[error("index {index} out of range 0..={max}")]
    Index { index: usize, max: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("linear solver did not converge after {iterations} iterations (residual norm {residual:e})")]
    Solver { iterations: usize, residual: f64 },
    #[error("resolution error: cylinder k={k} has {nodes} nodes in {dimension}, need at least {required}")]
    Resolution {
        k: usize,
        dimension: &'static str,
        nodes: usize,
        required: usize,
    },
    #[error("wrong solver: {0}")]
    WrongSolver(String),
    #[error("divergent integral: {0}")]
    Divergence(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Index { .. }
                | Error::Precondition(_)
                | Error::Shape(_)
                | Error::Config(_)
                | Error::Data(_)
                | Error::WrongSolver(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Overflow { .. } => "overflow",
            Error::Accuracy { .. } => "accuracy",
            Error::Index { .. } => "index",
            Error::Precondition(_) => "precondition",
            Error::Shape(_) => "shape",
            Error::Config(_) => "config",
            Error::Data(_) => "data",
            Error::Solver { .. } => "solver",
            Error::Resolution { .. } => "resolution",
            Error::WrongSolver(_) => "wrong_solver",
            Error::Divergence(_) => "divergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
