//! Exact hyperbolic geometry in the Poincaré half-plane and disk.
//!
//! The two models are related by the Cayley map `zeta = i (z - i) / (z + i)`,
//! which sends `i` to the origin and the point at infinity to `zeta = i`.
//! Orientation-preserving isometries of the disk form SU(1,1).

mod curves;
mod point;
mod su11;

pub use curves::{
    geodesic_through, horocycle_through, horocycle_through_halfplane, horodistance, same_boundary_point, Geodesic,
    Horocycle, ModelPoint,
};
pub use point::{
    boundary_map, dist, dist_from_origin, normalize_angle, to_disk, to_halfplane, BoundaryPoint, DiskPoint,
    HalfPlanePoint, MapDirection,
};
pub use su11::{CartanFactors, SU11Element};

/// Algebraic tolerance (group constraint, tangency, recomposition).
pub const EPS_ALG: f64 = 1e-12;
/// Geometric tolerance (vertical-geodesic detection, boundary-point identity).
pub const EPS_GEO: f64 = 1e-9;
