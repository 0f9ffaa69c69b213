use thiserror::Error;

/// Errors raised by the algebra, the probability functionals and the sampler.
///
/// Magnitudes are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal mass {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not an orthogonal projector (defect {defect:e})")]
    NotProjector { defect: f64 },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("scale factor must be a nonnegative real, got {0}")]
    NegativeScale(f64),

    #[error("superoperator is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCp { min_eigenvalue: f64 },

    #[error("{0} is not an operation")]
    NotOperation(String),

    #[error("conditioning weight {weight:e} is not above tolerance")]
    ZeroCondition { weight: f64 },

    #[error("resolution does not sum to a trivial operation (|a(I)-I| = {unital_defect:e}, |a^(I)-I| = {tracial_defect:e})")]
    NotResolution {
        unital_defect: f64,
        tracial_defect: f64,
    },

    #[error("resolution size {0} is outside 1..=10000")]
    ResolutionSize(usize),

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("instrument has no outcomes")]
    EmptyInstrument,

    #[error("duplicate outcome label {0:?}")]
    DuplicateOutcome(String),

    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),

    #[error("instrument outcomes do not sum to a trivial operation (|a(I)-I| = {unital_defect:e}, |a^(I)-I| = {tracial_defect:e})")]
    NotTrivialSum {
        unital_defect: f64,
        tracial_defect: f64,
    },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("not an effect: {0}")]
    NotEffect(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("sampled outcome {label:?} has probability {probability:e}")]
    ZeroProbabilityBranch { label: String, probability: f64 },

    #[error("condition (step {step}, outcome {outcome:?}) never occurred in {trials} trials")]
    NoConditionHits {
        step: usize,
        outcome: String,
        trials: u64,
    },

    #[error("invalid simulation request: {0}")]
    InvalidRequest(String),
}

impl Error {
    /// True for failures that indicate broken numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_)
                | Error::NoConvergence { .. }
                | Error::ZeroProbabilityBranch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
