use thiserror::Error;

/// Errors raised by the decision procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    EigenNotConverged { sweeps: usize, residual: f64 },

    #[error("function is constant")]
    ConstantFunction,

    #[error("affine function has a numerically zero normal vector")]
    ZeroCovector,

    #[error("coefficient matrix is singular (alpha*delta - beta*gamma = {det:e})")]
    SingularCombination { det: f64 },

    #[error("level set is empty")]
    EmptyLevelSet,

    #[error("non-finite coefficient")]
    NonFinite,

    #[error("invalid tolerances: tol_rel={tol_rel:e}, tol_abs={tol_abs:e}")]
    InvalidTolerances { tol_rel: f64, tol_abs: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid oracle requires n == 2, got n = {0}")]
    GridDimension(usize),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
