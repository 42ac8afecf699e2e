use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("generation failed after {retries} retries")]
    GenerationFailed { retries: usize },

    #[error("matrix order {order} exceeds dense limit {limit}")]
    DimensionLimit { order: usize, limit: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("explicit Euler unstable: dt * mu_1 bound = {0} >= 2")]
    StabilityViolation(f64),

    #[error("initial state is not orthogonal to the all-ones vector")]
    NonOrthogonalInitial,

    #[error("system has no interlinks")]
    EmptyInterlinks,

    #[error("singular system: layer graph is disconnected")]
    SingularSystem,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("cross-check failed: {lhs} vs {rhs}")]
    CrossCheckFailed { lhs: f64, rhs: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
