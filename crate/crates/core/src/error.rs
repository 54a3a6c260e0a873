use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("spectral window contains no eigenvalue")]
    EmptyWindow,

    #[error("window selector is not an interval")]
    NotAnInterval,

    #[error("rooted graph has {size} vertices, above the cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("depth mismatch: {0} vs {1}")]
    DepthMismatch(usize, usize),

    #[error("digest collision between distinct canonical codes")]
    DigestCollision,

    #[error("spectral parameter must satisfy Im z > 0, got Im z = {0}")]
    NotUpperHalfPlane(f64),

    #[error("fixed point did not converge at z = {re} + {im}i (residual {residual:e})")]
    FixedPoint { re: f64, im: f64, residual: f64 },

    #[error("window of length {length} is below the required minimum {required}")]
    WindowTooSmall { length: f64, required: f64 },

    #[error("rooted balls are not isomorphic")]
    NotIsomorphic,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
