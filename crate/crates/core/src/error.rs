use thiserror::Error;

/// Errors raised by the library. Indices in messages are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖A − A*‖ = {residual:.3e} exceeds {threshold:.3e}")]
    NotHermitian { residual: f64, threshold: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("basis of subspace {index} is not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { index: usize, deviation: f64 },

    #[error("diagonal block {block} is not the identity (deviation {deviation:.3e})")]
    DiagonalBlock { block: usize, deviation: f64 },

    #[error("operator is not positive semidefinite: most negative eigenvalue {eigenvalue:.6e}")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix {index} is not an orthoprojector (residual {residual:.3e})")]
    NotProjector { index: usize, residual: f64 },

    #[error("matrix {index} is singular or not positive definite")]
    Singular { index: usize },

    #[error("positivity criterion ξI − Σ τ_k² R_k ≥ 0 fails (smallest eigenvalue {eigenvalue:.6e})")]
    CriterionViolated { eigenvalue: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis not certified: no invertible path from block {from} to block {to} with at most {max_len} factors")]
    HypothesisNotCertified { from: usize, to: usize, max_len: usize },

    #[error("unknown case: {0}")]
    UnknownCase(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
