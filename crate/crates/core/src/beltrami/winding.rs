//! Beltrami coordinates on an open horoball, wound around the pseudosphere.
//!
//! Inside the bounding horocycle `H_b`, `u` is the distance from `H_b` to the
//! concentric horocycle through the point and `v` is horocyclic arclength
//! measured on `H_b` itself, counted from the geodesic joining `b` to the
//! disk origin. In these coordinates the metric is `du^2 + e^{-2u} dv^2`, so
//! reducing `v` modulo `2 pi` wraps each strip of width `2 pi` once around
//! the surface.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::surface::BeltramiChart;
use crate::error::{Error, Result};
use crate::hypmodels::{to_halfplane, BoundaryPoint, DiskPoint, Horocycle, EPS_ALG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WoundPoint {
    /// `u >= 0` and `v` in `[0, 2 pi)`.
    pub chart: BeltramiChart,
    /// Number of whole turns, `floor(arclength / 2 pi)`.
    pub winding: i64,
    /// Unreduced `v`.
    pub arclength: f64,
    /// `d(0, H_b)`, so that `<zeta, b> = offset + u`.
    pub offset: f64,
}

/// Horocycle of normal `b` tangent to the forbidden horoball `y > 1`; in the
/// half-plane it is the circle of diameter one standing on `b`.
pub fn bounding_horocycle(b: BoundaryPoint) -> Result<Horocycle> {
    match b.to_halfplane() {
        BoundaryPoint::Real(base) => Ok(Horocycle::HalfPlane { base, radius: 0.5 }),
        _ => Err(Error::InvalidArgument(
            "b = i is the normal of the forbidden region; no horocycle of that normal is tangent to it".into(),
        )),
    }
}

/// [`wind_horocycle_in`] with the default bounding horocycle of normal `b`.
pub fn wind_horocycle(zeta: DiskPoint, b: BoundaryPoint) -> Result<WoundPoint> {
    wind_horocycle_in(zeta, &bounding_horocycle(b)?)
}

/// Beltrami coordinates of `zeta` relative to the horoball bounded by
/// `bounding`. Fails when `zeta` lies outside it.
pub fn wind_horocycle_in(zeta: DiskPoint, bounding: &Horocycle) -> Result<WoundPoint> {
    let z = to_halfplane(zeta)?;
    // (log depth, arclength on the bounding horocycle, offset)
    let (u, s, offset) = match bounding.to_halfplane()? {
        Horocycle::HalfPlane { base, radius } => {
            // w = -1 / (z - base) sends b to infinity; Im w = y / |z - base|^2
            let (dx, y) = (z.x - base, z.y);
            let n = dx * dx + y * y;
            let diameter = 2.0 * radius;
            let u = (diameter * y / n).ln();
            let re_w = -dx / n;
            let re_ref = base / (1.0 + base * base);
            (u, diameter * (re_ref - re_w), ((1.0 + base * base) / diameter).ln())
        }
        Horocycle::HalfPlaneLine { height } => ((z.y / height).ln(), z.x / height, height.ln()),
        Horocycle::Disk { .. } => unreachable!(),
    };
    if u < -EPS_ALG * (1.0 + offset.abs()) || !u.is_finite() {
        return Err(Error::Domain(format!("point lies outside the bounding horocycle (depth {u:e})")));
    }
    let v = s.rem_euclid(TAU);
    let v = if v >= TAU { 0.0 } else { v };
    let winding = ((s - v) / TAU).round() as i64;
    Ok(WoundPoint { chart: BeltramiChart { u: u.max(0.0), v }, winding, arclength: s, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypmodels::{dist, horodistance, to_disk, HalfPlanePoint};
    use crate::rays::{horocycle_flow, inward_normal};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn disk(x: f64, y: f64) -> DiskPoint {
        to_disk(HalfPlanePoint::new(x, y).unwrap()).unwrap()
    }

    #[test]
    fn bounding_horocycle_has_zero_depth() {
        for xb in [0.0, 0.4, -2.0] {
            let b = BoundaryPoint::Real(xb);
            let h = bounding_horocycle(b).unwrap();
            for [x, y] in h.sample(16) {
                let w = wind_horocycle(disk(x, y), b).unwrap();
                assert!(w.chart.u.abs() <= 1e-12, "{w:?}");
            }
        }
        assert!(bounding_horocycle(BoundaryPoint::Infinity).is_err());
        assert!(bounding_horocycle(BoundaryPoint::disk(std::f64::consts::FRAC_PI_2)).is_err());
    }

    #[test]
    fn outside_points_rejected() {
        let b = BoundaryPoint::Real(0.0);
        assert!(wind_horocycle(disk(0.0, 1.5), b).is_err());
        assert!(wind_horocycle(disk(3.0, 0.5), b).is_err());
        assert!(wind_horocycle(disk(0.0, 0.5), b).is_ok());
    }

    #[test]
    fn depth_matches_horodistance_difference() {
        for (xb, x, y) in [(0.0, 0.1, 0.3), (0.7, 0.6, 0.05), (-1.5, -1.4, 0.5)] {
            let b = BoundaryPoint::Real(xb);
            let zeta = disk(x, y);
            let w = wind_horocycle(zeta, b).unwrap();
            let on_h = disk(xb, 1.0);
            let d_b = horodistance(on_h, b).unwrap();
            assert_abs_diff_eq!(w.offset, d_b, epsilon = 1e-12);
            assert_abs_diff_eq!(w.chart.u, horodistance(zeta, b).unwrap() - d_b, epsilon = 1e-11);
        }
    }

    #[test]
    fn reference_geodesic_has_v_zero() {
        // the geodesic from b = 0 through i is the imaginary axis
        let b = BoundaryPoint::Real(0.0);
        for y in [0.1, 0.5, 0.99] {
            let w = wind_horocycle(disk(0.0, y), b).unwrap();
            assert_eq!((w.chart.v, w.winding), (0.0, 0));
        }
    }

    #[test]
    fn strips_of_width_two_pi_wrap_once() {
        let b = BoundaryPoint::Real(0.3);
        let z0 = HalfPlanePoint::new(0.35, 0.2).unwrap();
        let w0 = wind_horocycle(to_disk(z0).unwrap(), b).unwrap();
        // a strip of width 2 pi on the bounding horocycle has width 2 pi e^{-u} at depth u
        let j = TAU * (-w0.chart.u).exp();
        let v = inward_normal(z0, b);
        for (k, sign) in [(1i64, 1.0), (-1, -1.0)] {
            let moved = horocycle_flow(v, b, sign * j).unwrap().base;
            let w1 = wind_horocycle(to_disk(moved).unwrap(), b).unwrap();
            assert_abs_diff_eq!(w1.chart.u, w0.chart.u, epsilon = 1e-10);
            let dv = (w1.chart.v - w0.chart.v + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
            assert!(dv.abs() < 1e-9, "{w0:?} {w1:?}");
            assert_eq!((w1.winding - w0.winding).abs(), k.abs());
        }
        // on the bounding horocycle itself the separation is exactly 2 pi
        let top = HalfPlanePoint::new(0.3, 1.0).unwrap();
        let wt = wind_horocycle(to_disk(top).unwrap(), b).unwrap();
        let moved = horocycle_flow(inward_normal(top, b), b, TAU).unwrap().base;
        let wm = wind_horocycle(to_disk(moved).unwrap(), b).unwrap();
        assert_abs_diff_eq!((wm.arclength - wt.arclength).abs(), TAU, epsilon = 1e-9);
        assert_eq!((wm.winding - wt.winding).abs(), 1);
    }

    fn chord(a: &WoundPoint, b: &WoundPoint) -> f64 {
        let du = b.chart.u - a.chart.u;
        let dv = b.arclength - a.arclength;
        let um = 0.5 * (a.chart.u + b.chart.u);
        (du * du + (-2.0 * um).exp() * dv * dv).sqrt()
    }

    proptest! {
        #[test]
        fn winding_is_a_local_isometry(xb in -2.0..2.0f64, t in 0.05..3.1f64, depth in 0.05..0.95f64, dir in 0.0..TAU) {
            let b = BoundaryPoint::Real(xb);
            // a point inside the bounding horocycle: scale the circle of diameter one about b
            let r = 0.5 * depth;
            let z = HalfPlanePoint::new(xb + r * t.cos(), r + r * t.sin() * 0.999).unwrap();
            prop_assume!(z.y > 1e-3);
            let step = 1e-4 * z.y;
            let z2 = HalfPlanePoint::new(z.x + step * dir.cos(), z.y + step * dir.sin()).unwrap();
            let (p, q) = (to_disk(z).unwrap(), to_disk(z2).unwrap());
            let (wp, wq) = (wind_horocycle(p, b).unwrap(), wind_horocycle(q, b).unwrap());
            let d = dist(p, q);
            prop_assert!((chord(&wp, &wq) - d).abs() <= 1e-8 * d.max(1e-4), "{} {}", chord(&wp, &wq), d);
        }
    }

    #[test]
    fn custom_bounding_horocycle_at_infinity() {
        let h = Horocycle::HalfPlaneLine { height: 2.0 };
        let w = wind_horocycle_in(disk(1.0, 2.0 * std::f64::consts::E), &h).unwrap();
        assert_abs_diff_eq!(w.chart.u, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.arclength, 0.5, epsilon = 1e-12);
        assert!(wind_horocycle_in(disk(0.0, 1.0), &h).is_err());
    }
}
