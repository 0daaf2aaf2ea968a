use num_complex::Complex64;

/// Crate-wide error type.
///
/// Variants mirror the failure vocabulary of the library surface: argument
/// validation, enumeration budgets, hyperbolicity violations detected at a
/// point, numerical breakdowns, sample-generator contracts, infeasible
/// optimization domains, and statistical-hypothesis checks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The univariate restriction t ↦ h(te − x) has a root with an imaginary
    /// part beyond tolerance, so x is outside the domain where the form
    /// behaves hyperbolically.
    #[error(
        "restriction has a non-real root {root} (|Im| = {im_abs:.3e}, tolerance {tol:.3e}); \
         the form is not hyperbolic at this point"
    )]
    NotHyperbolicAtPoint {
        root: Complex64,
        im_abs: f64,
        tol: f64,
    },

    #[error("numerical failure in {context}: residual {residual:.3e}")]
    NumericalFailure { context: String, residual: f64 },

    #[error("sample generator contract violated: {0}")]
    GeneratorContract(String),

    #[error("no feasible point: {0}")]
    Infeasible(String),

    #[error("hypothesis violated ({what}); offending indices {indices:?}")]
    HypothesisViolation { what: String, indices: Vec<usize> },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// Wraps an error raised inside trial `trial` of a seeded experiment so
    /// the report can name the offending trial.
    #[error("trial {trial}: {source}")]
    TrialFailure {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed description: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_trial(self, trial: u64) -> Self {
        Error::TrialFailure {
            trial,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
