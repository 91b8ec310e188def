use thiserror::Error;

/// Errors reported by the analysis toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its construction invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An input lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Set operations require both rasters to share one grid.
    #[error("grid mismatch: rasters were built on different grids")]
    GridMismatch,

    /// Root isolation is implemented for degree <= 4 only.
    #[error("polynomial degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),

    /// The zero polynomial has no isolated roots.
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
