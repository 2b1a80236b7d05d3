use thiserror::Error;

/// Errors raised by the engine.
///
/// Every failure carries enough text to locate the offending generator,
/// index pair or monomial; nothing is retried or approximated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live over different generator tables")]
    MismatchedAlgebra,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("infinite basis: {0}")]
    InfiniteBasis(String),
    #[error("invalid generator table: {0}")]
    InvalidTable(String),
    #[error("operator is not nilpotent within {cap} steps")]
    NotNilpotent { cap: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("vector field is not morphic: {0}")]
    NotMorphic(String),
    #[error("Jacobi identity fails: {0}")]
    JacobiFailure(String),
    #[error("not a Lie algebra action: bracket of generators {i} and {j} is not reproduced")]
    NotAnAction { i: usize, j: usize },
    #[error("differential is not homological: {0}")]
    NotHomological(String),
    #[error("subspace is not closed under the differential: {0}")]
    NotClosed(String),
    #[error("weight is not preserved: {0}")]
    WeightNotPreserved(String),
    #[error("face or degeneracy index {index} out of range at level {level}")]
    IndexOutOfRange { index: usize, level: usize },
    #[error("cochains belong to different groupoids")]
    MismatchedGroupoid,
    #[error("cochain is not normalized: {0}")]
    NotNormalized(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
