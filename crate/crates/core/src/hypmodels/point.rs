use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EPS_ALG;
use crate::error::{Error, Result};
use crate::hypmodels::su11::SU11Element;

/// Point of the upper half-plane `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(Error::Domain(format!("half-plane point needs y > 0, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Hyperbolic distance in the half-plane metric `|dz| / y`.
    pub fn distance(self, other: Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let num = dx * dx + dy * dy;
        // cosh d = 1 + |z-w|^2 / (2 y y'), written through asinh for small d
        2.0 * (0.5 * (num / (self.y * other.y)).sqrt()).asinh()
    }
}

/// Point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub xi: f64,
    pub eta: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { xi: 0.0, eta: 0.0 };

    pub fn new(xi: f64, eta: f64) -> Result<Self> {
        if !(xi.is_finite() && eta.is_finite()) || xi * xi + eta * eta >= 1.0 {
            return Err(Error::Domain(format!("disk point needs |zeta| < 1, got ({xi}, {eta})")));
        }
        Ok(Self { xi, eta })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// `modulus * e^{i angle}`.
    pub fn polar(modulus: f64, angle: f64) -> Result<Self> {
        Self::new(modulus * angle.cos(), modulus * angle.sin())
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.xi, self.eta)
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.xi.hypot(self.eta)
    }
}

/// Ideal boundary point of either model.
///
/// The disk variant stores the angle of `e^{i phi}`; the half-plane boundary
/// is the real axis plus an explicit point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Disk { phi: f64 },
    Real(f64),
    Infinity,
}

/// Which way [`boundary_map`] carries a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    DiskToHalfPlane,
    HalfPlaneToDisk,
}

/// Reduces an angle to `[0, period)`.
pub fn normalize_angle(angle: f64, period: f64) -> f64 {
    let a = angle.rem_euclid(period);
    if a >= period {
        0.0
    } else {
        a
    }
}

impl BoundaryPoint {
    pub fn disk(phi: f64) -> Self {
        BoundaryPoint::Disk { phi: normalize_angle(phi, TAU) }
    }

    /// Angle of the point on the unit circle, converting from the half-plane
    /// boundary when needed.
    pub fn disk_angle(self) -> f64 {
        match boundary_map(self, MapDirection::HalfPlaneToDisk) {
            BoundaryPoint::Disk { phi } => phi,
            _ => unreachable!("boundary_map to the disk always yields a disk point"),
        }
    }

    /// `e^{i phi}` in the disk model.
    pub fn unit(self) -> Complex64 {
        Complex64::from_polar(1.0, self.disk_angle())
    }

    pub fn to_halfplane(self) -> BoundaryPoint {
        boundary_map(self, MapDirection::DiskToHalfPlane)
    }

    pub fn to_disk(self) -> BoundaryPoint {
        boundary_map(self, MapDirection::HalfPlaneToDisk)
    }
}

/// Cayley map `zeta = i (z - i) / (z + i)` from the half-plane to the disk.
pub fn to_disk(z: HalfPlanePoint) -> Result<DiskPoint> {
    if !(z.y > 0.0) {
        return Err(Error::Domain(format!("to_disk needs y > 0, got {}", z.y)));
    }
    let z = z.to_complex();
    let i = Complex64::i();
    DiskPoint::from_complex(i * (z - i) / (z + i))
}

/// Inverse Cayley map `z = -i (zeta + i) / (zeta - i)`.
pub fn to_halfplane(zeta: DiskPoint) -> Result<HalfPlanePoint> {
    let w = zeta.to_complex();
    if !(w.norm_sqr() < 1.0) {
        return Err(Error::Domain(format!("to_halfplane needs |zeta| < 1, got {}", w.norm())));
    }
    let i = Complex64::i();
    let z = -i * (w + i) / (w - i);
    // y = (1 - |zeta|^2) / |zeta - i|^2 exactly; use it to keep y > 0 near the rim.
    let y = (1.0 - zeta.modulus()) * (1.0 + zeta.modulus()) / (w - i).norm_sqr();
    HalfPlanePoint::new(z.re, y)
}

/// Continuous extension of the Cayley maps to the ideal boundaries.
/// `e^{i pi/2} = i` corresponds to the point at infinity.
pub fn boundary_map(b: BoundaryPoint, direction: MapDirection) -> BoundaryPoint {
    match (direction, b) {
        (MapDirection::DiskToHalfPlane, BoundaryPoint::Disk { phi }) => {
            let phi = normalize_angle(phi, TAU);
            if (phi - FRAC_PI_2).abs() <= EPS_ALG * 1e-3 {
                BoundaryPoint::Infinity
            } else {
                // -i (e^{i phi} + i) / (e^{i phi} - i) = tan(phi/2 + pi/4)
                BoundaryPoint::Real((0.5 * phi + FRAC_PI_4).tan())
            }
        }
        (MapDirection::HalfPlaneToDisk, BoundaryPoint::Real(x)) => BoundaryPoint::disk(2.0 * x.atan() - FRAC_PI_2),
        (MapDirection::HalfPlaneToDisk, BoundaryPoint::Infinity) => BoundaryPoint::disk(FRAC_PI_2),
        (_, other) => other,
    }
}

/// Hyperbolic distance in the disk, computed by moving `p` to the origin with
/// an explicit SU(1,1) element and measuring `ln((1 + |w|) / (1 - |w|))`.
pub fn dist(p: DiskPoint, q: DiskPoint) -> f64 {
    let g = SU11Element::moving_to_origin(p);
    let w = g.act_complex(q.to_complex()).norm();
    if w >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * w.atanh()
}

/// Distance from the origin, `ln((1 + |zeta|) / (1 - |zeta|))`.
pub fn dist_from_origin(zeta: DiskPoint) -> f64 {
    2.0 * zeta.modulus().atanh()
}
