use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e} exceeds {tolerance:.3e}"
    )]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix of size {rows}x{cols} exceeds the supported maximum of 16")]
    Oversize { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a proper rotation: |R^T R - I| = {orthogonality:.3e}, det = {det:.6}")]
    ImproperRotation { orthogonality: f64, det: f64 },

    #[error("SU(2) lift failed: adjoint-action residual {residual:.3e}")]
    LiftFailure { residual: f64 },

    #[error("integration failed at t = {t}: step size {step:.3e} underflowed")]
    IntegrationFailure { t: f64, step: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("no root bracket found: {0}")]
    EmptyBracket(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
