use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: residual {residual:e} exceeds {bound:e}")]
    NotHermitian { residual: f64, bound: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vectors are not orthonormal: residual {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("anticonjugation requires an even dimension, got {0}")]
    OddDimension(usize),

    #[error("not a valid {what}: residual {residual:e} exceeds {bound:e}")]
    InvalidStructure {
        what: &'static str,
        residual: f64,
        bound: f64,
    },

    #[error("matrix is not skew-symmetric: residual {residual:e} exceeds {bound:e}")]
    NotSkewSymmetric { residual: f64, bound: f64 },

    #[error("antilinear operator is not skew-self-adjoint: residual {residual:e} exceeds {bound:e}")]
    NotSkewSelfAdjoint { residual: f64, bound: f64 },

    #[error("kernel has odd dimension {kernel_dim}; no anticonjugation exists on an odd-dimensional space")]
    OddKernel { kernel_dim: usize },

    #[error("Schatten exponent p = {0} is not admissible")]
    InvalidP(f64),

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("seed vector has zero norm")]
    ZeroVector,

    #[error("step {step}: no partition with at most {max_cells} cells met the budget {budget:e} (best {best:e})")]
    BudgetFailure {
        step: usize,
        max_cells: usize,
        budget: f64,
        best: f64,
    },

    #[error("numerical kernels of T and T* differ: residual {residual:e} exceeds {bound:e}")]
    KernelMismatch { residual: f64, bound: f64 },

    #[error("decomposition did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid rank {rank} for dimension {dim}: {reason}")]
    InvalidRank {
        rank: usize,
        dim: usize,
        reason: &'static str,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
