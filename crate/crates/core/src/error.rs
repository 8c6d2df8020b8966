use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("entries length {found} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, found: usize },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("not Hermitian: max deviation {0:e} exceeds tolerance 1e-10")]
    NotHermitian(f64),

    #[error("trace is {0} but must be 1 within 1e-10")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:e} below tolerance -1e-10")]
    NotPositive(f64),

    #[error("Bloch vector norm {0} exceeds 1")]
    OutsideBlochBall(f64),

    #[error("operation requires a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("resource cap exceeded: {requested} > {limit}")]
    ResourceCap { limit: usize, requested: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
