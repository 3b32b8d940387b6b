use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the model domain: {0}")]
    Domain(String),

    #[error("SU(1,1) constraint violated: |a|^2 - |c|^2 - 1 = {residual:e}")]
    Constraint { residual: f64 },

    #[error("coincident points do not determine a geodesic")]
    CoincidentPoints,

    #[error("kernel diverges: |zeta| = {modulus} is within {clamp:e} of the boundary")]
    Divergence { modulus: f64, clamp: f64 },

    #[error("periodic quadrature did not converge after {nodes} nodes (last change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("finite-difference stencil leaves the domain at ({x}, {y})")]
    StencilOutOfDomain { x: f64, y: f64 },

    #[error("integration step underflow at arclength {s} (y = {y:e})")]
    StepUnderflow { s: f64, y: f64 },

    #[error("minimizer did not converge in {iterations} iterations (gradient norm {gradient_norm:e})")]
    NotConverged { iterations: usize, gradient_norm: f64 },

    #[error("tangent vector is not the inward normal of the horocycle (angle mismatch {mismatch:e})")]
    NotInwardNormal { mismatch: f64 },

    #[error("ray {index} is not perpendicular to the horocycle: {reason}")]
    NotPerpendicular { index: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
