//! Geodesics and horocycles, stored by their Euclidean parameters.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::{to_disk, to_halfplane, BoundaryPoint, DiskPoint, HalfPlanePoint};
use super::{EPS_ALG, EPS_GEO};
use crate::error::{Error, Result};
use crate::specfun::poisson_kernel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geodesic {
    /// Euclidean half-circle centred on the real axis.
    HalfPlaneCircle { x0: f64, radius: f64 },
    /// Vertical half-line `x = x0`.
    HalfPlaneVertical { x0: f64 },
    /// Circular arc (or diameter) of the disk meeting the boundary at `start` and `end`.
    DiskArc { start: BoundaryPoint, end: BoundaryPoint },
}

impl Geodesic {
    /// Endpoints on the ideal boundary of the model the geodesic lives in.
    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        match *self {
            Geodesic::HalfPlaneCircle { x0, radius } => {
                (BoundaryPoint::Real(x0 - radius), BoundaryPoint::Real(x0 + radius))
            }
            Geodesic::HalfPlaneVertical { x0 } => (BoundaryPoint::Real(x0), BoundaryPoint::Infinity),
            Geodesic::DiskArc { start, end } => (start, end),
        }
    }

    /// Geodesic joining two distinct ideal points of the half-plane.
    pub fn between(b0: BoundaryPoint, b1: BoundaryPoint) -> Result<Self> {
        match (b0.to_halfplane(), b1.to_halfplane()) {
            (BoundaryPoint::Real(a), BoundaryPoint::Real(b)) => {
                if (a - b).abs() <= EPS_ALG * (1.0 + a.abs()) {
                    return Err(Error::CoincidentPoints);
                }
                Ok(Geodesic::HalfPlaneCircle { x0: 0.5 * (a + b), radius: 0.5 * (a - b).abs() })
            }
            (BoundaryPoint::Real(a), BoundaryPoint::Infinity) | (BoundaryPoint::Infinity, BoundaryPoint::Real(a)) => {
                Ok(Geodesic::HalfPlaneVertical { x0: a })
            }
            _ => Err(Error::CoincidentPoints),
        }
    }

    /// Same geodesic in the half-plane representation.
    pub fn to_halfplane(&self) -> Result<Self> {
        match *self {
            Geodesic::DiskArc { start, end } => Geodesic::between(start, end),
            other => Ok(other),
        }
    }

    /// Same geodesic as a disk arc.
    pub fn to_disk(&self) -> Self {
        let (s, e) = self.endpoints();
        Geodesic::DiskArc { start: s.to_disk(), end: e.to_disk() }
    }

    /// Whether the geodesic has `b` as one of its ideal endpoints.
    pub fn ends_at(&self, b: BoundaryPoint) -> bool {
        let (s, e) = self.endpoints();
        same_boundary_point(s, b) || same_boundary_point(e, b)
    }

    /// The endpoint that is not `b`, if `b` is an endpoint.
    pub fn other_end(&self, b: BoundaryPoint) -> Option<BoundaryPoint> {
        let (s, e) = self.endpoints();
        if same_boundary_point(s, b) {
            Some(e)
        } else if same_boundary_point(e, b) {
            Some(s)
        } else {
            None
        }
    }

    /// Hyperbolic distance from a half-plane point to the geodesic.
    ///
    /// `sinh d = | |z - x0|^2 - R^2 | / (2 R y)` for a half-circle and
    /// `sinh d = |x - x0| / y` for a vertical line.
    pub fn distance_from(&self, z: HalfPlanePoint) -> Result<f64> {
        Ok(match self.to_halfplane()? {
            Geodesic::HalfPlaneCircle { x0, radius } => {
                let dx = z.x - x0;
                let power = (dx - radius) * (dx + radius) + z.y * z.y;
                (power.abs() / (2.0 * radius * z.y)).asinh()
            }
            Geodesic::HalfPlaneVertical { x0 } => ((z.x - x0).abs() / z.y).asinh(),
            Geodesic::DiskArc { .. } => unreachable!(),
        })
    }

    /// Euclidean distance from a half-plane point to the locus.
    pub fn euclidean_deviation(&self, z: HalfPlanePoint) -> Result<f64> {
        Ok(match self.to_halfplane()? {
            Geodesic::HalfPlaneCircle { x0, radius } => ((z.x - x0).hypot(z.y) - radius).abs(),
            Geodesic::HalfPlaneVertical { x0 } => (z.x - x0).abs(),
            Geodesic::DiskArc { .. } => unreachable!(),
        })
    }
}

/// Boundary points compared in the disk model up to `EPS_GEO`.
pub fn same_boundary_point(a: BoundaryPoint, b: BoundaryPoint) -> bool {
    match (a, b) {
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
        (BoundaryPoint::Real(x), BoundaryPoint::Real(y)) => (x - y).abs() <= EPS_GEO * (1.0 + x.abs()),
        _ => (a.unit() - b.unit()).norm() <= EPS_GEO,
    }
}

/// Points of either model that determine a geodesic through two of them.
pub trait ModelPoint: Copy {
    fn geodesic_to(&self, other: &Self) -> Result<Geodesic>;
}

impl ModelPoint for HalfPlanePoint {
    /// Vertical line when `|p.x - q.x| <= EPS_GEO`, otherwise the half-circle
    /// centred at `x0 = (|q|^2 - |p|^2) / (2 (q.x - p.x))`.
    fn geodesic_to(&self, q: &Self) -> Result<Geodesic> {
        let p = self;
        if (p.x - q.x).hypot(p.y - q.y) <= EPS_ALG {
            return Err(Error::CoincidentPoints);
        }
        let dx = q.x - p.x;
        if dx.abs() <= EPS_GEO {
            return Ok(Geodesic::HalfPlaneVertical { x0: 0.5 * (p.x + q.x) });
        }
        // |q|^2 - |p|^2 factored to limit cancellation
        let num = (q.x - p.x) * (q.x + p.x) + (q.y - p.y) * (q.y + p.y);
        let x0 = num / (2.0 * dx);
        let radius = (p.x - x0).hypot(p.y);
        Ok(Geodesic::HalfPlaneCircle { x0, radius })
    }
}

impl ModelPoint for DiskPoint {
    /// Transported from the half-plane through the Cayley map.
    fn geodesic_to(&self, q: &Self) -> Result<Geodesic> {
        if (self.to_complex() - q.to_complex()).norm() <= EPS_ALG {
            return Err(Error::CoincidentPoints);
        }
        let g = to_halfplane(*self)?.geodesic_to(&to_halfplane(*q)?)?;
        Ok(g.to_disk())
    }
}

pub fn geodesic_through<P: ModelPoint>(p: P, q: P) -> Result<Geodesic> {
    p.geodesic_to(&q)
}

/// A horocycle, i.e. a Euclidean circle internally tangent to the ideal
/// boundary at its normal point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Horocycle {
    /// Disk model: circle tangent to the unit circle at `e^{i phi}`, so that
    /// `|center| + radius = 1`.
    Disk { phi: f64, center: [f64; 2], radius: f64 },
    /// Half-plane, finite normal `base`: circle centred at `(base, radius)`.
    HalfPlane { base: f64, radius: f64 },
    /// Half-plane, normal at infinity: the line `y = height`.
    HalfPlaneLine { height: f64 },
}

impl Horocycle {
    pub fn normal(&self) -> BoundaryPoint {
        match *self {
            Horocycle::Disk { phi, .. } => BoundaryPoint::disk(phi),
            Horocycle::HalfPlane { base, .. } => BoundaryPoint::Real(base),
            Horocycle::HalfPlaneLine { .. } => BoundaryPoint::Infinity,
        }
    }

    /// Disk horocycle of normal `e^{i phi}` and Euclidean radius `radius`.
    pub fn disk(phi: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidArgument(format!("disk horocycle radius must be in (0,1), got {radius}")));
        }
        let b = Complex64::from_polar(1.0 - radius, phi);
        Ok(Horocycle::Disk { phi: BoundaryPoint::disk(phi).disk_angle(), center: [b.re, b.im], radius })
    }

    /// `n` points evenly spaced in Euclidean angle about the centre, offset by
    /// half a step so the tangency point itself is never sampled. For the
    /// horizontal line the samples span `x in [-1, 1]`.
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        match *self {
            Horocycle::Disk { phi, center, radius } => (0..n)
                .map(|k| {
                    let t = phi + TAU * (k as f64 + 0.5) / n as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
            Horocycle::HalfPlane { base, radius } => (0..n)
                .map(|k| {
                    // angle measured from the downward direction, i.e. from the tangency point
                    let t = -std::f64::consts::FRAC_PI_2 + TAU * (k as f64 + 0.5) / n as f64;
                    [base + radius * t.cos(), radius + radius * t.sin()]
                })
                .collect(),
            Horocycle::HalfPlaneLine { height } => (0..n)
                .map(|k| {
                    let x = if n > 1 { -1.0 + 2.0 * k as f64 / (n - 1) as f64 } else { 0.0 };
                    [x, height]
                })
                .collect(),
        }
    }

    /// Signed Euclidean test: negative strictly inside the horoball, zero on
    /// the horocycle, positive outside.
    pub fn level(&self, p: [f64; 2]) -> f64 {
        match *self {
            Horocycle::Disk { center, radius, .. } => (p[0] - center[0]).hypot(p[1] - center[1]) - radius,
            Horocycle::HalfPlane { base, radius } => (p[0] - base).hypot(p[1] - radius) - radius,
            Horocycle::HalfPlaneLine { height } => height - p[1],
        }
    }

    /// Same horocycle in the half-plane model.
    pub fn to_halfplane(&self) -> Result<Self> {
        match *self {
            Horocycle::Disk { phi, center, radius } => {
                let b = Complex64::from_polar(1.0, phi);
                // point of the circle diametrically opposite the tangency point
                let far = Complex64::new(center[0], center[1]) - b * radius;
                let w = to_halfplane(DiskPoint::from_complex(far)?)?;
                horocycle_through_halfplane(w, BoundaryPoint::disk(phi).to_halfplane())
            }
            other => Ok(other),
        }
    }

    /// Same horocycle in the disk model.
    pub fn to_disk(&self) -> Result<Self> {
        let top = match *self {
            Horocycle::Disk { .. } => return Ok(*self),
            Horocycle::HalfPlane { base, radius } => HalfPlanePoint::new(base, 2.0 * radius)?,
            Horocycle::HalfPlaneLine { height } => HalfPlanePoint::new(0.0, height)?,
        };
        horocycle_through(to_disk(top)?, self.normal())
    }
}

/// Disk horocycle of normal `b` through `zeta`: radius `1 / (1 + P(zeta, b))`,
/// centre `(1 - radius) b`.
pub fn horocycle_through(zeta: DiskPoint, b: BoundaryPoint) -> Result<Horocycle> {
    let phi = b.disk_angle();
    let unit = b.unit();
    let w = zeta.to_complex();
    let gap = (unit - w).norm_sqr();
    if gap == 0.0 {
        return Err(Error::Domain("zeta coincides with the normal point".into()));
    }
    let inner = (1.0 - zeta.modulus()) * (1.0 + zeta.modulus());
    // 1 / (1 + P) with P = inner / gap
    let radius = gap / (gap + inner);
    let center = unit * (1.0 - radius);
    Ok(Horocycle::Disk { phi, center: [center.re, center.im], radius })
}

/// Half-plane horocycle of normal `b` (real or infinity) through `z`.
pub fn horocycle_through_halfplane(z: HalfPlanePoint, b: BoundaryPoint) -> Result<Horocycle> {
    match b.to_halfplane() {
        BoundaryPoint::Infinity => Ok(Horocycle::HalfPlaneLine { height: z.y }),
        BoundaryPoint::Real(base) => {
            // (x - base)^2 + y^2 = 2 radius y
            let dx = z.x - base;
            Ok(Horocycle::HalfPlane { base, radius: (dx * dx + z.y * z.y) / (2.0 * z.y) })
        }
        BoundaryPoint::Disk { .. } => unreachable!(),
    }
}

/// Signed distance `<zeta, b> = ln P(zeta, b)` from the origin to the
/// horocycle of normal `b` through `zeta`; negative when the origin lies
/// inside that horocycle.
pub fn horodistance(zeta: DiskPoint, b: BoundaryPoint) -> Result<f64> {
    Ok(poisson_kernel(zeta, b)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypmodels::dist;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_pair_gives_centred_circle() {
        let p = HalfPlanePoint::new(-0.5, 0.4).unwrap();
        let q = HalfPlanePoint::new(0.5, 0.4).unwrap();
        match geodesic_through(p, q).unwrap() {
            Geodesic::HalfPlaneCircle { x0, radius } => {
                assert_abs_diff_eq!(x0, 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(radius, (0.25f64 + 0.16).sqrt(), epsilon = 1e-15);
            }
            g => panic!("unexpected {g:?}"),
        }
    }

    #[test]
    fn equal_abscissae_give_vertical_line() {
        let p = HalfPlanePoint::new(1.0, 0.3).unwrap();
        let q = HalfPlanePoint::new(1.0, 0.8).unwrap();
        assert_eq!(geodesic_through(p, q).unwrap(), Geodesic::HalfPlaneVertical { x0: 1.0 });
        assert_eq!(geodesic_through(p, p), Err(Error::CoincidentPoints));
    }

    #[test]
    fn both_points_lie_on_returned_geodesic() {
        let pairs = [((-0.7, 0.2), (1.3, 0.9)), ((0.1, 2.0), (0.2, 0.01)), ((5.0, 1.0), (-3.0, 4.0))];
        for ((a, b), (c, d)) in pairs {
            let p = HalfPlanePoint::new(a, b).unwrap();
            let q = HalfPlanePoint::new(c, d).unwrap();
            let g = geodesic_through(p, q).unwrap();
            assert!(g.euclidean_deviation(p).unwrap() < 1e-12);
            assert!(g.euclidean_deviation(q).unwrap() < 1e-12);
        }
    }

    #[test]
    fn disk_geodesic_through_origin_is_diameter() {
        let p = DiskPoint::new(0.0, 0.5).unwrap();
        let g = geodesic_through(DiskPoint::ORIGIN, p).unwrap();
        let (s, e) = g.endpoints();
        let angles = [s.disk_angle(), e.disk_angle()];
        assert!(angles.iter().any(|a| (a - PI / 2.0).abs() < 1e-12));
        assert!(angles.iter().any(|a| (a - 1.5 * PI).abs() < 1e-12));
    }

    #[test]
    fn point_to_geodesic_distance_matches_brute_force() {
        let g = Geodesic::HalfPlaneCircle { x0: 0.3, radius: 0.8 };
        let z = HalfPlanePoint::new(1.4, 0.5).unwrap();
        let brute = (1..20000)
            .map(|k| {
                let t = PI * k as f64 / 20000.0;
                z.distance(HalfPlanePoint::new(0.3 + 0.8 * t.cos(), 0.8 * t.sin()).unwrap())
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(g.distance_from(z).unwrap(), brute, epsilon = 1e-6);
    }

    #[test]
    fn horocycle_through_origin_normal_i() {
        let h = horocycle_through(DiskPoint::ORIGIN, BoundaryPoint::disk(PI / 2.0)).unwrap();
        match h {
            Horocycle::Disk { center, radius, .. } => {
                assert_abs_diff_eq!(radius, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(center[0], 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(center[1], 0.5, epsilon = 1e-15);
            }
            _ => unreachable!(),
        }
        // image of the line y = 1
        assert_eq!(h.to_halfplane().unwrap(), Horocycle::HalfPlaneLine { height: 1.0 });
    }

    #[test]
    fn horocycle_shrinks_toward_its_normal() {
        let b = BoundaryPoint::disk(0.7);
        let mut last = 1.0;
        for eps in [1e-1, 1e-2, 1e-3, 1e-5] {
            let z = DiskPoint::polar(1.0 - eps, 0.7).unwrap();
            let Horocycle::Disk { radius, .. } = horocycle_through(z, b).unwrap() else { unreachable!() };
            assert!(radius < last);
            assert!(radius <= eps);
            last = radius;
        }
    }

    #[test]
    fn horocycle_is_tangent_and_a_poisson_level_set() {
        let z = DiskPoint::new(-0.2, 0.35).unwrap();
        let b = BoundaryPoint::disk(4.0);
        let h = horocycle_through(z, b).unwrap();
        let Horocycle::Disk { center, radius, .. } = h else { unreachable!() };
        assert_abs_diff_eq!(center[0].hypot(center[1]) + radius, 1.0, epsilon = 1e-12);
        let p0 = poisson_kernel(z, b).unwrap();
        for s in h.sample(32) {
            let p = poisson_kernel(DiskPoint::new(s[0], s[1]).unwrap(), b).unwrap();
            assert!((p - p0).abs() < 1e-10 * p0);
        }
    }

    #[test]
    fn horocycle_model_round_trip() {
        let h = horocycle_through(DiskPoint::new(0.1, -0.3).unwrap(), BoundaryPoint::disk(5.5)).unwrap();
        let back = h.to_halfplane().unwrap().to_disk().unwrap();
        let (Horocycle::Disk { center: c0, radius: r0, .. }, Horocycle::Disk { center: c1, radius: r1, .. }) =
            (h, back)
        else {
            unreachable!()
        };
        assert_abs_diff_eq!(r0, r1, epsilon = 1e-12);
        assert_abs_diff_eq!(c0[0], c1[0], epsilon = 1e-12);
        assert_abs_diff_eq!(c0[1], c1[1], epsilon = 1e-12);
    }

    #[test]
    fn horodistance_examples() {
        let phi = 1.1;
        let z = DiskPoint::polar(0.5, phi).unwrap();
        assert_abs_diff_eq!(horodistance(z, BoundaryPoint::disk(phi)).unwrap(), 3f64.ln(), epsilon = 1e-14);
        for k in 0..8 {
            let b = BoundaryPoint::disk(k as f64);
            assert_eq!(horodistance(DiskPoint::ORIGIN, b).unwrap(), 0.0);
        }
        let inside = horodistance(DiskPoint::new(0.5, 0.0).unwrap(), BoundaryPoint::disk(PI)).unwrap();
        assert_abs_diff_eq!(inside, (1.0f64 / 3.0).ln(), epsilon = 1e-14);
        assert!(inside < 0.0);
    }

    #[test]
    fn horodistance_on_radius_is_distance_from_origin() {
        let z = DiskPoint::polar(0.83, 2.0).unwrap();
        let d = horodistance(z, BoundaryPoint::disk(2.0)).unwrap();
        assert_abs_diff_eq!(d, dist(DiskPoint::ORIGIN, z), epsilon = 1e-13);
    }
}
