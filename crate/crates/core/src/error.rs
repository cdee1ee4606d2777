use thiserror::Error;

/// Errors raised by the cone, factorization, geometry and sampling routines.
///
/// Indices carried by variants are 1-based, matching the minor or pivot order.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("minor {0} is numerically zero; matrix is outside (or on the boundary of) the open cone")]
    MinorNearZero(usize),
    #[error("matrix is numerically singular")]
    SingularMatrix,
    #[error("sign patterns differ: {left} vs {right}")]
    PatternMismatch { left: String, right: String },
    #[error("square-root radicand at pivot {0} is not positive")]
    NegativeRadicand(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cone kinds differ")]
    ConeKindMismatch,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not self-adjoint")]
    NotSymmetric,
    #[error("matrix is not lower triangular with positive diagonal")]
    NotCholeskyFactor,
    #[error("invalid sign pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid distribution spec: {0}")]
    SpecInvalid(String),
    #[error("walk increments do not live in the requested group: {0}")]
    GroupMismatch(String),
    #[error("dimension {n} exceeds cap {cap}")]
    DimensionCap { n: usize, cap: usize },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("empty input")]
    EmptyInput,
}

impl Error {
    /// Stable variant name, used by the CLI when reporting domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MinorNearZero(_) => "MinorNearZero",
            Error::SingularMatrix => "SingularMatrix",
            Error::PatternMismatch { .. } => "PatternMismatch",
            Error::NegativeRadicand(_) => "NegativeRadicand",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::ConeKindMismatch => "ConeKindMismatch",
            Error::NotSquare => "NotSquare",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotCholeskyFactor => "NotCholeskyFactor",
            Error::InvalidPattern(_) => "InvalidPattern",
            Error::SpecInvalid(_) => "SpecInvalid",
            Error::GroupMismatch(_) => "GroupMismatch",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::DegenerateParameters(_) => "DegenerateParameters",
            Error::ConstraintViolation(_) => "ConstraintViolation",
            Error::EmptyInput => "EmptyInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
