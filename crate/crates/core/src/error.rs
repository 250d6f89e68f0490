use std::io;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("point {point} outside [0, {upper})")]
    PointOutOfRange { point: f64, upper: f64 },

    #[error("rejection sampling gave up after {attempts} attempts at vertex {vertex}")]
    RejectionLimit { vertex: usize, attempts: u64 },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("size cap exceeded: {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("urn state not available for this graph")]
    MissingUrnState,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::VertexOutOfRange { .. }
                | Error::PointOutOfRange { .. }
                | Error::Parse { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
