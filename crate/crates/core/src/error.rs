//! Error types shared by all modules.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A dimension argument was below the minimum (most operations need dim >= 2).
    #[error("invalid dimension {dim}: expected dim >= {min}")]
    InvalidDimension { dim: usize, min: usize },

    /// Matrix or vector shapes do not line up.
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    /// A matrix that must be unitary is not, within tolerance.
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    /// A state vector that must be normalized is not, within tolerance.
    #[error("state is not normalized (defect {defect:.3e})")]
    NotNormalized { defect: f64 },

    /// Tolerance outside the accepted range (0, 1e-3).
    #[error("tolerance {eps:.3e} outside accepted range (0, 1e-3)")]
    InvalidTolerance { eps: f64 },

    /// A family of operators contains a non-commuting pair.
    #[error(
        "not simultaneously diagonalizable: operators {i} and {j} have commutator norm {norm:.3e}"
    )]
    NotSimultaneouslyDiagonalizable { i: usize, j: usize, norm: f64 },

    /// Operation only defined for prime local dimension.
    #[error("unsupported dimension {dim}: prime dimension required")]
    UnsupportedDimension { dim: usize },

    /// Set members are not pairwise trace-orthogonal.
    #[error("states {i} and {j} are not orthogonal (|tr| = {overlap:.3e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },

    /// A protocol precondition failed (e.g. copier does not intertwine a member).
    #[error("protocol mismatch: {0}")]
    ProtocolMismatch(String),

    /// An operator lacks the controlled-subtraction block structure.
    #[error("structure violation: {0}")]
    StructureViolation(String),

    /// Kraus operators do not satisfy the completeness relation.
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// A noise specification does not yield a valid channel.
    #[error("invalid noise spec: {0}")]
    InvalidSpec(String),

    /// A matrix that must be a density operator is not.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A witness fails its own consistency requirement.
    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    /// The requested protocol does not apply to the given set.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A simulation was asked for zero rounds.
    #[error("empty report: zero rounds requested")]
    EmptyReport,
}

pub type Result<T> = std::result::Result<T, Error>;
