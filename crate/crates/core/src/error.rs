use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a partition needs at least one cell")]
    EmptyPartition,

    #[error("partitions with {0} and {1} cells are not nested")]
    NonNestedMeshes(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0} lies outside [0, 1]")]
    PointOutsideDomain(f64),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("incompatible spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("matrix not SPD (pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("zero pivot at row {0}; matrix is singular or not quasi-definite")]
    SingularPivot(usize),

    #[error("CG did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
        best: Vec<f64>,
    },

    #[error("eigensolver breakdown (last Rayleigh quotient {last_rayleigh:e})")]
    EigenBreakdown { last_rayleigh: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
