//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by operator construction, variable maps and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// A vector or matrix had the wrong length for the requested operation.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// An input contained NaN or infinite entries.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A scalar or structural argument was out of its allowed range.
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// Sparse construction saw the same (row, col) position twice.
    #[error("duplicate sparse entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    /// Sparse construction saw an index outside the declared shape.
    #[error("sparse index ({row}, {col}) out of range for {rows}x{cols}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    /// A vector expected on the unit sphere was too far from it.
    #[error("point is off the unit sphere: |r|^2 = {norm_sq}")]
    OffSphere { norm_sq: f64 },

    /// A game point violated the coupling constraint `wᵀw = gamma·alpha`.
    #[error("infeasible game point: |wᵀw - gamma*alpha| = {gap}")]
    InfeasiblePoint { gap: f64 },

    /// The inverse variable map has a pole at `alpha_tilde = 1`; the sphere
    /// point was within `eps_pole` of it. Carries the sphere objective so the
    /// caller still learns the attained value.
    #[error("degenerate apex: alpha_tilde within pole guard of 1 (objective {value})")]
    DegenerateApex { value: f64 },

    /// The entire optimal set of the sphere problem is the apex point, which
    /// contradicts the standing solvability assumption on the game.
    #[error("optimal set is only the apex; game has no attained optimum (objective {value})")]
    ApexOnlyOptimum { value: f64 },

    /// The linear term is zero: the sphere problem is a pure minimum-eigenvector
    /// problem, outside the span of any Krylov space grown from it. Callers
    /// should use the dense oracle path.
    #[error("centered problem (g = 0): use the eigen oracle path")]
    CenteredProblem,

    /// A Lanczos step was requested after the process found an invariant
    /// subspace.
    #[error("Lanczos process already broke down at step {step}")]
    LanczosBreakdown { step: usize },

    /// The safeguarded Newton iteration on the secular equation did not meet
    /// its tolerance; carries the final bracket.
    #[error("secular Newton did not converge in {iters} iterations (bracket [{lo}, {hi}])")]
    SecularNonConvergence { lo: f64, hi: f64, iters: usize },

    /// An iterative solver failed in a way retries cannot fix.
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),

    /// The dense oracle was asked to densify a problem above its size cap.
    #[error("problem dimension {dim} exceeds oracle size cap {cap}")]
    SizeCapExceeded { dim: usize, cap: usize },

    /// Brute-force search only supports 2-D and 3-D sphere problems.
    #[error("brute-force check unsupported for dimension {dim}")]
    UnsupportedDimension { dim: usize },

    /// The dense eigendecomposition failed to converge or to certify its
    /// result. The oracle refuses to degrade silently.
    #[error("eigendecomposition failure: {0}")]
    EigenFailure(&'static str),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
