//! Geometry of convex yield sets: distance, projection, support function,
//! projection differential and boundary curvature for intervals in `R` and for
//! cylinders `K + R Id` over compact convex deviatoric sets `K` (Von Mises
//! ball, Hill ellipsoid, Hosford).

mod eigen;
mod hosford;
mod surface;
mod symmatrix;

use thiserror::Error;

pub use eigen::{symmetric_eigen, SpectralDecomposition};
pub use hosford::{Hosford, SupportAscent};
pub use surface::{CurvatureBound, CurvatureReport, ProjectionResult, SurfaceSpec, YieldSurface};
pub use symmatrix::{deviatoric_dim, packed_len, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid yield surface: {0}")]
    InvalidSurface(String),
    #[error("surface acts on n = {expected}, got a point with n = {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("support function needs a trace-free argument (trace {trace:e})")]
    NotDeviatoric { trace: f64 },
    #[error("{what} did not converge within {iterations} iterations (residual {residual:e})")]
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("boundary not smooth enough: {0}")]
    NotSmooth(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}
