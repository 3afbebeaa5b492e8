use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("local dimensions {local_dims:?} do not factor a matrix of dimension {dim}")]
    BadDimensionFactorization { local_dims: Vec<usize>, dim: usize },
    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("excitation count k={k} invalid for n={n}")]
    BadExcitationCount { n: usize, k: usize },
    #[error("graph with {n} vertices exceeds the explicit-matrix limit of {limit}")]
    GraphTooLarge { n: usize, limit: usize },
    #[error("invalid graph: {0}")]
    BadGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("level index {index} out of range for {len} levels")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("ground level is {degeneracy}-fold degenerate")]
    DegenerateGround { degeneracy: u64 },
    #[error("gamma approximation of the partition function is undefined at alpha = 0")]
    AlphaZero,
    #[error("alpha = {0} outside (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("Dicke state with k={k} of n={n} is separable")]
    SeparableCase { n: usize, k: usize },
    #[error("n = {0} must be even")]
    OddN(usize),
    #[error("entanglement value {0} is negative")]
    NegativeEntanglement(f64),
    #[error("entanglement value {0} must be positive")]
    NonpositiveEntanglement(f64),
    #[error("expected dimension {expected}, got {got}")]
    BadDimension { expected: usize, got: usize },
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("threshold unreachable: (D-1) = {levels_above} <= 2^eR - 1 = {robustness}")]
    ThresholdUnreachable { levels_above: f64, robustness: f64 },
    #[error("ratio eR/n = {0} outside the admissible range")]
    RatioOutOfRange(f64),
    #[error("temperature grid needs at least two ascending points")]
    EmptyGrid,
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
