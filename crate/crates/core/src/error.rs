use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Lefschetz map is singular at the given class")]
    SingularLefschetz,
    #[error("derivative of the power map is singular at iteration {iteration}")]
    SingularDerivative { iteration: usize },
    #[error("Newton inversion did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: String },
    #[error("Newton inversion converged to a class outside the modeled ample cone")]
    ResultNotAmple,
    #[error("restricted intersection form is degenerate")]
    DegenerateForm,
    #[error("top self-intersection is not positive")]
    NotPositive,

    #[error("classes belong to different cohomology models ({0} vs {1})")]
    ModelMismatch(String, String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("discriminant pairing is negative ({0}); Bogomolov inequality fails for this data")]
    NegativeBound(String),
    #[error("region vertex {index} is not certified in P(X): {reason}")]
    RegionNotInP { index: usize, reason: String },
    #[error("enumeration budget of {budget} candidates exceeded")]
    EnumerationBudgetExceeded { budget: usize },

    #[error("region is empty")]
    EmptyRegion,
    #[error("wall pairing vanishes identically along the segment")]
    IdenticallyZero,
    #[error("no witness found within the search budget")]
    NotFound,
    #[error("no rational point found in the cell within the budget")]
    NoRationalPointFound,
    #[error("B = e(A, C) is not strictly ample for every tried A")]
    BNotAmple,
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("subobject slope equals total slope identically along the segment")]
    IdenticallyEqual,
    #[error("stability verdict differs inside one chamber at sample {sample}")]
    ConstancyViolation { sample: usize, first: String, second: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
