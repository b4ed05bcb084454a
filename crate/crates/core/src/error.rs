use thiserror::Error;

/// Errors produced by the billiard Wigner library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("all Gaussian overlaps vanish (largest |overlap| = {max_overlap:e})")]
    DegenerateState { max_overlap: f64 },

    #[error("quadrature did not converge: last change {change:e} exceeds {tolerance:e}")]
    QuadratureNotConverged { change: f64, tolerance: f64 },

    #[error("imaginary residue {residue:e} exceeds {tolerance:e} in a real-valued quantity")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("contour node with |y_{axis}| = {value:e} lies on a coordinate axis")]
    NodeOnAxis { axis: usize, value: f64 },

    #[error("kernel does not decay inside the p-window: edge/max ratio {ratio:e}")]
    WindowTooSmall { ratio: f64 },

    #[error("phase-space grid covers only {total} of the unit probability mass")]
    InsufficientCoverage { total: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
