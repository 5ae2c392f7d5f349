use thiserror::Error;

/// Errors produced by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:e}, max eigenvalue {max_eig:e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("eigenvalue {value:e} outside the domain of {function}")]
    OutsideDomain { function: String, value: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("t = {t} outside geodesic domain ({lo}, {hi})")]
    OutsideGeodesicDomain { t: f64, lo: f64, hi: f64 },

    #[error("integration left the SPD cone; last valid t = {last_t}")]
    BoundaryHit { last_t: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("degenerate plane: Gram determinant {det:e} below tolerance")]
    DegeneratePlane { det: f64 },

    #[error("matrices do not commute (commutator norm {norm:e}); use the transport ODE (bw_transport_ode)")]
    NonCommuting { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
