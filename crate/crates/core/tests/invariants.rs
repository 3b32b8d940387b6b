use std::f64::consts::{FRAC_PI_2, PI, TAU};

use hyperglass::beltrami::{chart_change, soliton, ChartId};
use hyperglass::hypmodels::{
    dist, horocycle_through, horodistance, to_disk, to_halfplane, BoundaryPoint, DiskPoint, HalfPlanePoint, Horocycle,
    SU11Element,
};
use hyperglass::rays::{horocycle_flow, inward_normal, trace_geodesic, RayState};
use hyperglass::specfun::poisson_kernel;
use num_complex::Complex64;
use proptest::prelude::*;

fn disk_point() -> impl Strategy<Value = DiskPoint> {
    (0.0..0.95f64, 0.0..TAU).prop_map(|(m, a)| DiskPoint::polar(m, a).unwrap())
}

fn element() -> impl Strategy<Value = SU11Element> {
    (0.0..2.0f64, 0.0..TAU, 0.0..TAU).prop_map(|(t, al, be)| {
        SU11Element::new(Complex64::from_polar(t.cosh(), al), Complex64::from_polar(t.sinh(), be)).unwrap()
    })
}

/// `cosh d = 1 + |z - w|^2 / (2 y y')`.
fn halfplane_dist(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    (1.0 + ((z.x - w.x).powi(2) + (z.y - w.y).powi(2)) / (2.0 * z.y * w.y)).acosh()
}

proptest! {
    #[test]
    fn cayley_round_trip(x in -5.0..5.0f64, y in 0.01..5.0f64) {
        let back = to_halfplane(to_disk(HalfPlanePoint::new(x, y).unwrap()).unwrap()).unwrap();
        prop_assert!((back.x - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!((back.y - y).abs() <= 1e-12 * (1.0 + y));
    }

    #[test]
    fn cayley_preserves_distance(x0 in -2.0..2.0f64, y0 in 0.1..2.0f64, x1 in -2.0..2.0f64, y1 in 0.1..2.0f64) {
        let (z, w) = (HalfPlanePoint::new(x0, y0).unwrap(), HalfPlanePoint::new(x1, y1).unwrap());
        let d = halfplane_dist(z, w);
        prop_assert!((dist(to_disk(z).unwrap(), to_disk(w).unwrap()) - d).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn action_is_an_isometry(g in element(), p in disk_point(), q in disk_point(), phi in 0.0..TAU) {
        let d = dist(p, q);
        let d_img = dist(g.act(p).unwrap(), g.act(q).unwrap());
        prop_assert!((d - d_img).abs() <= 1e-8 * (1.0 + d));
        let img = Complex64::from_polar(1.0, g.act_boundary(phi));
        let direct = {
            let b = Complex64::from_polar(1.0, phi);
            (g.a() * b + g.c()) / (g.c().conj() * b + g.a().conj())
        };
        prop_assert!((img - direct).norm() <= 1e-12);
    }

    #[test]
    fn products_stay_in_the_group(g in element(), h in element()) {
        prop_assert!((g * h).constraint_residual().abs() <= 1e-12 * (g * h).a().norm_sqr());
    }

    #[test]
    fn cartan_recomposes(g in element()) {
        let f = g.cartan_decompose();
        prop_assert!(f.r >= 0.0);
        let back = SU11Element::rotation(f.theta) * SU11Element::boost(f.r) * SU11Element::rotation(f.phi);
        prop_assert!(back.max_entry_diff(&g) <= 1e-12 * g.a().norm());
    }

    #[test]
    fn horocycles_are_internally_tangent(z in disk_point(), phi in 0.0..TAU) {
        let Horocycle::Disk { center, radius, .. } = horocycle_through(z, BoundaryPoint::disk(phi)).unwrap() else {
            unreachable!()
        };
        prop_assert!((center[0].hypot(center[1]) + radius - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn horodistance_is_log_kernel(z in disk_point(), phi in 0.0..TAU) {
        let b = BoundaryPoint::disk(phi);
        let (x, y) = (z.xi, z.eta);
        let p = (1.0 - x * x - y * y) / ((phi.cos() - x).powi(2) + (phi.sin() - y).powi(2));
        prop_assert!((horodistance(z, b).unwrap() - p.ln()).abs() <= 1e-12 * (1.0 + p.ln().abs()));
        prop_assert!(poisson_kernel(z, b).unwrap() > 0.0);
        prop_assert_eq!(poisson_kernel(DiskPoint::new(0.0, 0.0).unwrap(), b).unwrap(), 1.0);
    }

    #[test]
    fn traces_conserve_momentum(x in -1.0..1.0f64, y in 0.1..2.0f64, a in 0.0..TAU, s in 0.5..20.0f64) {
        let tol = 1e-9;
        let t = trace_geodesic(RayState::from_direction(x, y, a).unwrap(), s, tol).unwrap();
        prop_assert!(t.hamiltonian_drift <= 10.0 * tol);
        prop_assert!(t.px_drift <= 10.0 * tol);
    }

    #[test]
    fn horocycle_flow_keeps_membership_and_length(x in -2.0..2.0f64, y in 0.1..2.0f64, base in -2.0..2.0f64,
                                                   j in -3.0..3.0f64, at_infinity: bool) {
        let b = if at_infinity { BoundaryPoint::Infinity } else { BoundaryPoint::Real(base) };
        let z = HalfPlanePoint::new(x, y).unwrap();
        let w = horocycle_flow(inward_normal(z, b), b, j).unwrap().base;
        // level sets of the horofunction: y for b = infinity, y / |z - base|^2 otherwise
        let level = |p: HalfPlanePoint| match b {
            BoundaryPoint::Infinity => p.y,
            _ => p.y / ((p.x - base).powi(2) + p.y * p.y),
        };
        prop_assert!((level(w) / level(z) - 1.0).abs() <= 1e-10);
        // two points at horocyclic arclength j are 2 asinh(j / 2) apart
        prop_assert!((halfplane_dist(z, w) - 2.0 * (0.5 * j.abs()).asinh()).abs() <= 1e-9);
    }

    #[test]
    fn charts_round_trip(p in -5.0..5.0f64, q in -5.0..5.0f64, u in 0.0..10.0f64) {
        for via in [ChartId::PhiV, ChartId::AlphaBeta] {
            let back = chart_change(via, ChartId::Pq, chart_change(ChartId::Pq, via, [p, q]).unwrap()).unwrap();
            prop_assert!((back[0] - p).abs() <= 1e-12 && (back[1] - q).abs() <= 1e-12);
        }
        let back = chart_change(ChartId::PhiV, ChartId::Uv, chart_change(ChartId::Uv, ChartId::PhiV, [u, 0.0]).unwrap())
            .unwrap();
        prop_assert!((back[0] - u).abs() <= 1e-12);
    }

    #[test]
    fn soliton_range(p in -30.0..-1e-6f64) {
        let phi = soliton(p);
        prop_assert!(phi > FRAC_PI_2 && phi <= PI);
        prop_assert!(soliton(p * 0.5) <= phi);
    }
}
