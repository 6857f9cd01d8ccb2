use thiserror::Error;

/// Errors surfaced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum QuadError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("form is not dissipative: largest eigenvalue of Re Q is {max_eig:.3e} (tolerance {tol:.3e})")]
    NotDissipative { max_eig: f64, tol: f64 },

    #[error("singular space is not symplectic (restricted symplectic form is degenerate)")]
    NotSymplectic,

    #[error("partial ellipticity does not hold: {0}")]
    NotPartiallyElliptic(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: point counts {n} and {n2} disagree by {diff:.3e}")]
    QuadratureNonConvergence { n: usize, n2: usize, diff: f64 },

    #[error("quadratic form restricted to the singular space is {0} (expected definite)")]
    IndefiniteRestriction(String),

    #[error("lattice enumeration exceeded {0} nodes; shrink the rectangle")]
    EnumerationExplosion(usize),

    #[error("zero is a real eigenvalue of the Hamilton map, contradicting ellipticity on the singular space")]
    ZeroRealEigenvalue,

    #[error("desk-scale limit exceeded: {0}")]
    DeskScale(String),

    #[error("matrix exponential overflow guard: t*|M| = {0:.3e} > 1e4")]
    ExpOverflow(f64),

    #[error("fit window too short: {0} samples (need at least 5)")]
    WindowTooShort(usize),

    #[error("linear algebra backend error: {0}")]
    Lapack(String),

    #[error("{0}")]
    Other(String),
}

impl From<ndarray_linalg::error::LinalgError> for QuadError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        QuadError::Lapack(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QuadError>;
