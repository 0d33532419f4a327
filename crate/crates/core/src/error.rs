use thiserror::Error;

/// Errors raised by the algebra, operator, integration and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} exceeds the configured maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid basis index set {0:?}: indices must be strictly increasing and within 1..=m")]
    InvalidBlade(Vec<usize>),

    #[error("vector is not of unit length")]
    NotUnit,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("polynomial is not homogeneous of degree {expected} in u")]
    NotHomogeneous { expected: usize },

    #[error("degenerate parameters m={m}, k={k}: denominator {what} vanishes")]
    Degenerate { m: usize, k: usize, what: &'static str },

    #[error("domain violation for {op}: {test}")]
    Domain { op: String, test: String },

    #[error("input is not harmonic in u")]
    NotHarmonic,

    #[error("polynomial is not divisible by |u|^2")]
    NotDivisible,

    #[error("expected a polynomial in {0} only")]
    WrongVariables(&'static str),

    #[error("non-scalar coefficients where scalar-valued input is required")]
    NonScalar,

    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),

    #[error("quadrature rule of degree {degree} unavailable: {reason}")]
    Quadrature { degree: usize, reason: String },

    #[error("x and y coincide: kernel is singular")]
    Singular,

    #[error("no calibrated constant for m={m}, k={k}")]
    Uncalibrated { m: usize, k: usize },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("quadrature residual check failed: {0}")]
    QuadratureCheck(String),

    #[error("grid too coarse for requested stencil: {0}")]
    Stencil(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

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
