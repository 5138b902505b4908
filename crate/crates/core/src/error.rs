use thiserror::Error;

/// Errors raised by lattice, enumeration, chamber and geometry routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("gram matrix is degenerate (determinant 0)")]
    Degenerate,

    #[error("zero vector not allowed")]
    ZeroVector,

    #[error("wrong signature: expected (1, {expected_neg}), found ({pos}, {neg}, {zero})")]
    WrongSignature {
        expected_neg: usize,
        pos: usize,
        neg: usize,
        zero: usize,
    },

    #[error("vector {0} is isotropic")]
    Isotropic(String),

    #[error("reflection in {0} is not integral")]
    NonIntegralReflection(String),

    #[error("matrix is not an isometry of the form")]
    NotIsometry,

    #[error("vector {0} is not positive")]
    NotPositive(String),

    #[error("vector {0} is not negative")]
    NotNegative(String),

    #[error("vectors lie in different components of the positive cone")]
    DifferentComponents,

    #[error("point lies on wall {0}")]
    OnWall(String),

    #[error("wall {0} is not a face of the chamber")]
    NotAFace(String),

    #[error("wall {0} is not in the arrangement")]
    UnknownWall(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("complement of {0} is isotropic: cusp-bounded line, no closed geodesic")]
    CuspBounded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no valid extension found within search bound {bound}")]
    NoExtension { bound: i64 },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by malformed input or configuration rather than by the
    /// mathematics of a well-formed request.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownPreset(_) | Error::Parse(_) | Error::Io(_) | Error::InvalidWindow(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
