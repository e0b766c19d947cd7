//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across matrix arithmetic, decomposition,
/// equivalence testing, and total-variation analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("shape mismatch in {op}: left is {lhs_rows}x{lhs_cols}, right is {rhs_rows}x{rhs_cols}")]
    ShapeMismatch {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    /// A square matrix was required.
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Inversion or dual-basis construction hit a (numerically) singular matrix.
    #[error("singular matrix: {detail}")]
    Singular { detail: String },

    /// A tolerance configuration contained a non-positive or non-finite value.
    #[error("invalid tolerance: {0}")]
    BadTolerance(String),

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The eigenvalue solver did not converge.
    #[error("eigenvalue solver failed: {0}")]
    Eigensolver(String),

    /// Rank decisions under the configured tolerance are inconsistent with any
    /// valid Jordan structure (e.g. a non-monotone kernel-dimension sequence).
    #[error("ill-conditioned spectral structure: {0}")]
    IllConditionedStructure(String),

    /// The assembled decomposition failed its self-checks (reconstruction or
    /// chain-recursion residual too large, eigenvector matrix not invertible).
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    /// Input exceeds a hard size limit of an exhaustive-search operation.
    #[error("input size {size} exceeds the limit {limit} for {op}")]
    SizeLimit {
        op: &'static str,
        size: usize,
        limit: usize,
    },

    /// The columns passed as a Jordan chain do not satisfy the chain
    /// recursion within tolerance.
    #[error("not a Jordan chain: {0}")]
    NotAChain(String),

    /// A chain matrix was required to have unit induced L1 norm.
    #[error("chain matrix is not normalized: induced L1 norm is {norm}, expected 1")]
    UnnormalizedChain { norm: f64 },

    /// Spectral normalization of the shift is undefined because the spectral
    /// radius is zero.
    #[error("spectral normalization undefined: spectral radius is zero")]
    ZeroSpectralRadius,

    /// A block / component index was out of range.
    #[error("component index {index} out of range (decomposition has {count} blocks)")]
    InvalidComponent { index: usize, count: usize },

    /// A caller-supplied parameter was invalid for the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A redundant internal consistency check disagreed with the primary
    /// computation (e.g. direct and closed-form evaluations diverging).
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}
