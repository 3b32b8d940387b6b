//! Horocycle flow on the unit tangent bundle of the half-plane and the
//! entry/exit bookkeeping of ray bundles normal to a horocycle.
//!
//! A unit tangent vector is identified with the element `g` of PSL(2,R)
//! carrying the upward unit vector at `i` onto it. The flow along the
//! horocycle of normal `g(inf)` is right multiplication by `[[1, j], [0, 1]]`,
//! so `j` is hyperbolic arclength along the horocycle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypmodels::{
    horocycle_through_halfplane, same_boundary_point, BoundaryPoint, Geodesic, HalfPlanePoint, Horocycle, EPS_GEO,
};

/// Unit tangent vector at `base`, pointing at Euclidean angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    pub base: HalfPlanePoint,
    pub theta: f64,
}

impl UnitTangent {
    /// `g = [[sqrt y, x / sqrt y], [0, 1 / sqrt y]] k_t`, `t = (theta - pi/2) / 2`.
    fn frame(&self) -> [f64; 4] {
        let HalfPlanePoint { x, y } = self.base;
        let r = y.sqrt();
        let t = 0.5 * (self.theta - FRAC_PI_2);
        let (st, ct) = t.sin_cos();
        [r * ct - x / r * st, r * st + x / r * ct, -st / r, ct / r]
    }

    /// Forward endpoint of the geodesic this vector is tangent to.
    pub fn forward_endpoint(&self) -> BoundaryPoint {
        let [a, _, c, _] = self.frame();
        if c.abs() <= 1e-15 * a.abs() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Real(a / c)
        }
    }
}

/// Direction at `z` of the geodesic running to `b`, i.e. the inward normal of
/// the horocycle of normal `b` through `z`.
pub fn inward_normal(z: HalfPlanePoint, b: BoundaryPoint) -> UnitTangent {
    let theta = match b.to_halfplane() {
        BoundaryPoint::Real(x) => FRAC_PI_2 + 2.0 * (z.to_complex() - x).arg(),
        _ => FRAC_PI_2,
    };
    UnitTangent { base: z, theta: theta.rem_euclid(TAU) }
}

/// Slides `v` by hyperbolic arclength `j` along the horocycle of normal `b`
/// through its base point. `v` must be that horocycle's inward normal.
pub fn horocycle_flow(v: UnitTangent, b: BoundaryPoint, j: f64) -> Result<UnitTangent> {
    let expected = inward_normal(v.base, b).theta;
    let mismatch = (v.theta - expected + PI).rem_euclid(TAU) - PI;
    if mismatch.abs() > EPS_GEO {
        return Err(Error::NotInwardNormal { mismatch });
    }
    let [a, bb, c, d] = v.frame();
    let w = Complex64::new(j, 1.0);
    let base = (a * w + bb) / (c * w + d);
    let theta = FRAC_PI_2 - 2.0 * (c * w + d).arg();
    Ok(UnitTangent { base: HalfPlanePoint::from_complex(base)?, theta: theta.rem_euclid(TAU) })
}

/// Bundle of rays normal to a horocycle, counted at their crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayBundleReport {
    pub ray_count: usize,
    /// Crossings into the horoball, each ray traversed towards the normal.
    pub entry_flux: f64,
    /// Crossings out of the horoball, each ray traversed away from the normal.
    pub exit_flux: f64,
    pub horocycle: Horocycle,
}

/// Points of a half-plane geodesic at hyperbolic arclengths `-S..S`,
/// oriented towards its second endpoint.
fn walk(g: &Geodesic, n: usize, span: f64) -> Vec<[f64; 2]> {
    (0..=n)
        .map(|k| {
            let s = -span + 2.0 * span * k as f64 / n as f64;
            match *g {
                Geodesic::HalfPlaneCircle { x0, radius } => [x0 + radius * s.tanh(), radius / s.cosh()],
                Geodesic::HalfPlaneVertical { x0 } => [x0, s.exp()],
                Geodesic::DiskArc { .. } => unreachable!(),
            }
        })
        .collect()
}

fn sign_changes(levels: impl Iterator<Item = f64>, from_positive: bool) -> usize {
    let signs: Vec<bool> = levels.filter(|l| *l != 0.0).map(|l| l > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1] && w[0] == from_positive).count()
}

/// Counts, for every geodesic ending at the normal of `h`, the crossings of
/// `h` inward (traversed towards the normal) and outward (traversed away
/// from it). Geodesics that do not end at the normal are not orthogonal to
/// `h` and are rejected.
pub fn bundle_flux_report(h: &Horocycle, rays: &[Geodesic]) -> Result<RayBundleReport> {
    let hh = h.to_halfplane()?;
    let b = hh.normal();
    let counts: Vec<Result<(usize, usize)>> = rays
        .par_iter()
        .enumerate()
        .map(|(index, ray)| {
            let g = ray.to_halfplane()?;
            if g.other_end(b).is_none() {
                return Err(Error::NotPerpendicular { index, reason: "does not end at the horocycle normal".into() });
            }
            // orient from `other` to `b`
            let towards_b = same_boundary_point(g.endpoints().1, b);
            let mut pts = walk(&g, 4000, 25.0);
            if !towards_b {
                pts.reverse();
            }
            let levels: Vec<f64> = pts.iter().map(|p| hh.level(*p)).collect();
            let entries = sign_changes(levels.iter().copied(), true);
            let exits = sign_changes(levels.iter().rev().copied(), false);
            Ok((entries, exits))
        })
        .collect();
    let mut entry = 0usize;
    let mut exit = 0usize;
    for c in counts {
        let (e, x) = c?;
        entry += e;
        exit += x;
    }
    Ok(RayBundleReport { ray_count: rays.len(), entry_flux: entry as f64, exit_flux: exit as f64, horocycle: *h })
}

/// `n` geodesics leaving `b`, their far ends spread evenly in disk angle.
pub fn fan_from(b: BoundaryPoint, n: usize) -> Result<Vec<Geodesic>> {
    let phi = b.disk_angle();
    (0..n)
        .map(|k| {
            let far = BoundaryPoint::disk(phi + TAU * (k as f64 + 0.5) / n as f64);
            Geodesic::between(b, far)
        })
        .collect()
}

/// The geodesic orthogonal to both horocycles, joining their normals.
pub fn common_normal(h0: &Horocycle, h1: &Horocycle) -> Result<Geodesic> {
    Geodesic::between(h0.normal(), h1.normal())
}

/// Horocycle of normal `b` through `z`, with the inward normal there.
pub fn normal_frame(z: HalfPlanePoint, b: BoundaryPoint) -> Result<(Horocycle, UnitTangent)> {
    Ok((horocycle_through_halfplane(z, b)?, inward_normal(z, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn flow_at_infinity_translates() {
        let v = inward_normal(pt(0.0, 1.0), BoundaryPoint::Infinity);
        assert_abs_diff_eq!(v.theta, FRAC_PI_2, epsilon = 0.0);
        let w = horocycle_flow(v, BoundaryPoint::Infinity, 2.0).unwrap();
        assert_abs_diff_eq!(w.base.x, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.base.y, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.theta, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn zero_flow_is_identity() {
        let b = BoundaryPoint::Real(0.3);
        let v = inward_normal(pt(1.0, 0.4), b);
        let w = horocycle_flow(v, b, 0.0).unwrap();
        assert_abs_diff_eq!(w.base.x, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.base.y, 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(w.theta, v.theta, epsilon = 1e-14);
    }

    #[test]
    fn inward_normal_points_at_b() {
        for (z, b) in [(pt(1.0, 0.4), 0.3), (pt(-2.0, 3.0), 5.0), (pt(0.0, 1.0), 0.0)] {
            let v = inward_normal(z, BoundaryPoint::Real(b));
            match v.forward_endpoint() {
                BoundaryPoint::Real(e) => assert_abs_diff_eq!(e, b, epsilon = 1e-12),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn flow_stays_on_horocycle_and_has_unit_speed() {
        let b = BoundaryPoint::Real(0.0);
        let z = pt(0.5, 0.5);
        let (h, v) = normal_frame(z, b).unwrap();
        let Horocycle::HalfPlane { radius, .. } = h else { panic!() };
        for j in [-3.0, -0.5, 0.1, 1.0, 4.0] {
            let w = horocycle_flow(v, b, j).unwrap();
            assert!(h.level([w.base.x, w.base.y]).abs() <= 1e-12 * radius);
            // horocyclic arclength between points at distance d is 2 sinh(d/2)
            let d = z.distance(w.base);
            assert_abs_diff_eq!(2.0 * (0.5 * d).sinh(), j.abs(), epsilon = 1e-10 * (1.0 + j.abs()));
            // the flowed vector is again the inward normal
            assert_abs_diff_eq!(inward_normal(w.base, b).theta, w.theta, epsilon = 1e-10);
        }
    }

    #[test]
    fn non_normal_vector_rejected() {
        let v = UnitTangent { base: pt(0.0, 1.0), theta: 0.3 };
        assert!(matches!(horocycle_flow(v, BoundaryPoint::Infinity, 1.0), Err(Error::NotInwardNormal { .. })));
    }

    #[test]
    fn fan_counts_balance() {
        let h = Horocycle::disk(0.7, 0.4).unwrap();
        let rays = fan_from(h.normal(), 100).unwrap();
        let r = bundle_flux_report(&h, &rays).unwrap();
        assert_eq!((r.ray_count, r.entry_flux, r.exit_flux), (100, 100.0, 100.0));
        let empty = bundle_flux_report(&h, &[]).unwrap();
        assert_eq!((empty.entry_flux, empty.exit_flux), (0.0, 0.0));
    }

    #[test]
    fn ray_not_from_normal_rejected() {
        let h = Horocycle::HalfPlane { base: 0.0, radius: 0.5 };
        let rays = [
            Geodesic::between(BoundaryPoint::Real(0.0), BoundaryPoint::Real(2.0)).unwrap(),
            Geodesic::HalfPlaneCircle { x0: 3.0, radius: 1.0 },
        ];
        let err = bundle_flux_report(&h, &rays).unwrap_err();
        assert!(matches!(err, Error::NotPerpendicular { index: 1, .. }));
    }

    #[test]
    fn tangent_horocycles_share_one_normal_geodesic() {
        let h0 = Horocycle::HalfPlane { base: 0.0, radius: 0.5 };
        let h1 = Horocycle::HalfPlane { base: 1.0, radius: 0.5 };
        let g = common_normal(&h0, &h1).unwrap();
        assert_eq!(g, Geodesic::HalfPlaneCircle { x0: 0.5, radius: 0.5 });
        // it passes through the tangency point (1 + i)/2
        assert_abs_diff_eq!(g.distance_from(pt(0.5, 0.5)).unwrap(), 0.0, epsilon = 1e-15);
        for h in [h0, h1] {
            assert_eq!(h.level([0.5, 0.5]), 0.0);
            let r = bundle_flux_report(&h, &[g]).unwrap();
            assert_eq!((r.entry_flux, r.exit_flux), (1.0, 1.0));
        }
    }
}
