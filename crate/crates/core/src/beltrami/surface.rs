//! The parabolic pseudosphere of curvature `-1/rho^2`: tractrix, embeddings,
//! coordinate charts, first fundamental forms and curvature.
//!
//! All embeddings use the convention `x = rho sin(phi) cos v`,
//! `y = rho sin(phi) sin v`, with `phi` the angle between the meridian
//! tangent and the axis. The Beltrami chart `(u, v)` covers the upper
//! component (`z >= 0`, `phi` in `(0, pi/2]`); the `(p, q)` funnel uses the
//! lower one (`p <= 0`, `phi` in `[pi/2, pi)`). The two are mirror images.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::soliton::soliton;
use crate::error::{Error, Result};

/// Default curvature radius parameter.
pub const RHO: f64 = -1.0;

/// Symmetric 2x2 first fundamental form `[[E, F], [F, G]]`.
pub type Form = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiChart {
    pub u: f64,
    pub v: f64,
}

impl BeltramiChart {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u >= 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("Beltrami chart needs u >= 0, got ({u}, {v})")));
        }
        Ok(Self { u, v })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PQChart {
    pub p: f64,
    pub q: f64,
}

impl PQChart {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p <= 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("funnel chart needs p <= 0, got ({p}, {q})")));
        }
        Ok(Self { p, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudospherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PseudospherePoint {
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Distance in `z` from the `rho = -1` surface at this point's parallel
    /// radius; infinite off the radius range `(0, 1]`.
    pub fn surface_residual(&self) -> f64 {
        let r = self.x.hypot(self.y);
        if !(r > 0.0 && r <= 1.0) {
            return f64::INFINITY;
        }
        let s = ((1.0 - r) * (1.0 + r)).sqrt();
        (self.z.abs() - (s.ln_1p() - r.ln() - s)).abs()
    }
}

/// Coordinate systems on the pseudosphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    /// Beltrami coordinates, `u >= 0`.
    Uv,
    /// Meridian angle and longitude, `phi` in `(0, pi)`.
    PhiV,
    /// `dp = -csc(phi) dphi`, `dq = -dv`.
    Pq,
    /// Asymptotic-line arclengths, `p = alpha + beta`, `q = alpha - beta`.
    AlphaBeta,
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("meridian angle must lie in (0, pi), got {phi}")))
    }
}

/// Point `(x, z)` of the `rho = -1` tractrix at meridian angle `phi`.
pub fn tractrix(phi: f64) -> Result<[f64; 2]> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    // -(cos phi + ln tan(phi/2)) = atanh(cos phi) - cos phi
    Ok([-s, c.atanh() - c])
}

/// Length of the tangent segment from the tractrix point at `phi` to the
/// axis, from the analytic derivative `(x', z') = (-cos phi, -cos^2 phi / sin phi)`.
pub fn tangent_length(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    if c.abs() < 1e-12 {
        return Err(Error::Domain("the tractrix has a cusp at phi = pi/2".into()));
    }
    let [x, _] = tractrix(phi)?;
    let (dx, dz) = (-c, -c * c / s);
    // parameter at which the tangent line reaches x = 0
    let t = -x / dx;
    Ok(t.abs() * dx.hypot(dz))
}

/// `sin phi = e^{-u}` on the upper component, computed without cancellation
/// near the rim.
pub fn u_to_phi(u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("Beltrami coordinate u must be >= 0, got {u}")));
    }
    Ok((-u).exp().atan2((-(-2.0 * u).exp_m1()).sqrt()))
}

/// Inverse of [`u_to_phi`]; `phi` in `(pi/2, pi)` belongs to the lower
/// component and is rejected.
pub fn phi_to_u(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    if phi > FRAC_PI_2 {
        return Err(Error::Domain(format!("phi = {phi} lies on the lower component, outside the (u, v) chart")));
    }
    if phi < FRAC_PI_4 {
        return Ok(-phi.sin().ln());
    }
    let sh = (0.5 * (FRAC_PI_2 - phi)).sin();
    // -ln cos(pi/2 - phi) = -ln(1 - 2 sin^2((pi/2 - phi)/2))
    Ok(-(-2.0 * sh * sh).ln_1p())
}

/// `p = -ln tan(phi/2) = atanh(cos phi)`.
pub fn phi_to_p(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let c = phi.cos();
    if c.abs() < 0.5 {
        return Ok(c.atanh());
    }
    // atanh(cos phi) loses digits near the poles
    Ok(-(0.5 * phi).tan().ln())
}

fn to_phi_v(from: ChartId, [a, b]: [f64; 2]) -> Result<[f64; 2]> {
    match from {
        ChartId::Uv => Ok([u_to_phi(a)?, b]),
        ChartId::PhiV => check_phi(a).map(|_| [a, b]),
        ChartId::Pq => Ok([soliton(a), -b]),
        ChartId::AlphaBeta => Ok([soliton(a + b), -(a - b)]),
    }
}

fn from_phi_v(to: ChartId, [phi, v]: [f64; 2]) -> Result<[f64; 2]> {
    match to {
        ChartId::Uv => Ok([phi_to_u(phi)?, v]),
        ChartId::PhiV => Ok([phi, v]),
        ChartId::Pq => Ok([phi_to_p(phi)?, -v]),
        ChartId::AlphaBeta => {
            let (p, q) = (phi_to_p(phi)?, -v);
            Ok([0.5 * (p + q), 0.5 * (p - q)])
        }
    }
}

/// Converts coordinates between charts, passing through `(phi, v)` except
/// for the linear `(p, q) <-> (alpha, beta)` pair.
pub fn chart_change(from: ChartId, to: ChartId, coords: [f64; 2]) -> Result<[f64; 2]> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("non-finite coordinates {coords:?}")));
    }
    let [a, b] = coords;
    match (from, to) {
        _ if from == to => to_phi_v(from, coords).map(|_| coords),
        (ChartId::Pq, ChartId::AlphaBeta) => Ok([0.5 * (a + b), 0.5 * (a - b)]),
        (ChartId::AlphaBeta, ChartId::Pq) => Ok([a + b, a - b]),
        _ => from_phi_v(to, to_phi_v(from, coords)?),
    }
}

/// Parallel radius `r(u) = e^{u/rho}` of the parabolic surface of revolution.
pub fn parallel_radius(u: f64, rho: f64) -> f64 {
    (u / rho).exp()
}

/// `K = -r''(u) / r(u)` for `r(u) = e^{u/rho}`, using `r'' = r / rho^2`.
pub fn revolution_curvature(u: f64, rho: f64) -> f64 {
    let r = parallel_radius(u, rho);
    let rpp = r / (rho * rho);
    -rpp / r
}

/// Beltrami chart embedding for `rho = -1`.
pub fn embed_uv(c: BeltramiChart) -> Result<PseudospherePoint> {
    embed_uv_with(c, RHO)
}

/// Surface of revolution with parallel radius `e^{u/rho}` and meridian
/// height `z(u) = int_0^u sqrt(1 - e^{2t/rho} / rho^2) dt` measured from the
/// rim, for `rho < 0`. The rim sits at `u = 0` only when `rho = -1`.
pub fn embed_uv_with(c: BeltramiChart, rho: f64) -> Result<PseudospherePoint> {
    if !(rho < 0.0) {
        return Err(Error::InvalidArgument(format!("only rho < 0 is supported, got {rho}")));
    }
    BeltramiChart::new(c.u, c.v)?;
    let a = -rho;
    let ln_m = c.u / rho - a.ln();
    if ln_m > 0.0 {
        return Err(Error::Domain(format!("u = {} lies beyond the rim for rho = {rho}", c.u)));
    }
    let m = ln_m.exp();
    let s = (-(2.0 * ln_m).exp_m1()).sqrt();
    let z = a * (s.ln_1p() - ln_m - s);
    let r = a * m;
    let (sv, cv) = c.v.sin_cos();
    Ok(PseudospherePoint { x: -r * cv, y: -r * sv, z })
}

/// `rho = -1` surface in `(phi, v)`, both components.
pub fn embed_phi_v(phi: f64, v: f64) -> Result<PseudospherePoint> {
    let [x, z] = tractrix(phi)?;
    let (sv, cv) = v.sin_cos();
    Ok(PseudospherePoint { x: x * cv, y: x * sv, z })
}

/// Lower funnel `(-cos q / cosh p, sin q / cosh p, p - tanh p)`.
pub fn embed_pq(c: PQChart) -> Result<PseudospherePoint> {
    let PQChart { p, q } = PQChart::new(c.p, c.q)?;
    let w = 1.0 / p.cosh();
    let (sq, cq) = q.sin_cos();
    Ok(PseudospherePoint { x: -w * cq, y: w * sq, z: p - p.tanh() })
}

pub fn embed_alpha_beta(alpha: f64, beta: f64) -> Result<PseudospherePoint> {
    embed_pq(PQChart::new(alpha + beta, alpha - beta)?)
}

/// Embedding of `chart` as a plain function of its two coordinates.
pub fn embed(chart: ChartId, [a, b]: [f64; 2]) -> Result<PseudospherePoint> {
    match chart {
        ChartId::Uv => embed_uv(BeltramiChart::new(a, b)?),
        ChartId::PhiV => embed_phi_v(a, b),
        ChartId::Pq => embed_pq(PQChart::new(a, b)?),
        ChartId::AlphaBeta => embed_alpha_beta(a, b),
    }
}

/// Analytic first fundamental form at `rho^2 = 1`.
pub fn fundamental_form(chart: ChartId, [a, b]: [f64; 2]) -> Result<Form> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("non-finite coordinates ({a}, {b})")));
    }
    match chart {
        ChartId::Uv => {
            BeltramiChart::new(a, b)?;
            Ok([[1.0, 0.0], [0.0, (-2.0 * a).exp()]])
        }
        ChartId::PhiV => {
            check_phi(a)?;
            let (s, c) = a.sin_cos();
            let cot = c / s;
            Ok([[cot * cot, 0.0], [0.0, s * s]])
        }
        ChartId::Pq => {
            let (t, w) = (a.tanh(), 1.0 / a.cosh());
            Ok([[t * t, 0.0], [0.0, w * w]])
        }
        ChartId::AlphaBeta => {
            let c = (2.0 * soliton(a + b)).cos();
            Ok([[1.0, c], [c, 1.0]])
        }
    }
}

/// First fundamental form pulled back through `embed` with central
/// differences of step `h`.
pub fn metric_pullback(
    embed: impl Fn(f64, f64) -> Result<PseudospherePoint>,
    [a, b]: [f64; 2],
    h: f64,
) -> Result<Form> {
    let diff = |pa: [f64; 2], pb: [f64; 2]| -> Result<[f64; 3]> {
        let p = embed(pa[0], pa[1])?.to_array();
        let m = embed(pb[0], pb[1])?.to_array();
        Ok([0, 1, 2].map(|k| (p[k] - m[k]) / (2.0 * h)))
    };
    let ra = diff([a + h, b], [a - h, b])?;
    let rb = diff([a, b + h], [a, b - h])?;
    let dot = |x: &[f64; 3], y: &[f64; 3]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let f = dot(&ra, &rb);
    Ok([[dot(&ra, &ra), f], [f, dot(&rb, &rb)]])
}

/// Gaussian curvature from a first fundamental form alone (Brioschi),
/// with derivatives by fourth-order central differences of step `h`.
pub fn brioschi_curvature(metric: impl Fn(f64, f64) -> Result<Form>, [a, b]: [f64; 2], h: f64) -> Result<f64> {
    let mut g = [[[0.0; 3]; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            let m = metric(a + (i as f64 - 2.0) * h, b + (j as f64 - 2.0) * h)?;
            g[i][j] = [m[0][0], m[0][1], m[1][1]];
        }
    }
    const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
    const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let at = |i: usize, j: usize, k: usize| g[i][j][k];
    let d_a = |k| (0..5).map(|i| D1[i] * at(i, 2, k)).sum::<f64>() / (12.0 * h);
    let d_b = |k| (0..5).map(|j| D1[j] * at(2, j, k)).sum::<f64>() / (12.0 * h);
    let d_aa = |k| (0..5).map(|i| D2[i] * at(i, 2, k)).sum::<f64>() / (12.0 * h * h);
    let d_bb = |k| (0..5).map(|j| D2[j] * at(2, j, k)).sum::<f64>() / (12.0 * h * h);
    let d_ab = |k| {
        (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).map(|(i, j)| D1[i] * D1[j] * at(i, j, k)).sum::<f64>()
            / (144.0 * h * h)
    };
    let (e, f, gg) = (at(2, 2, 0), at(2, 2, 1), at(2, 2, 2));
    let (ea, eb, fa, fb, ga, gb) = (d_a(0), d_b(0), d_a(1), d_b(1), d_a(2), d_b(2));
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 =
        [[-0.5 * d_bb(0) + d_ab(1) - 0.5 * d_aa(2), 0.5 * ea, fa - 0.5 * eb], [fb - 0.5 * ga, e, f], [0.5 * gb, f, gg]];
    let m2 = [[0.0, 0.5 * eb, 0.5 * ga], [0.5 * eb, e, f], [0.5 * ga, f, gg]];
    let w = e * gg - f * f;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("degenerate metric at ({a}, {b})")));
    }
    Ok((det3(m1) - det3(m2)) / (w * w))
}

/// Brioschi curvature of `chart`'s analytic form. The `5 x 5` stencil must stay
/// inside the chart and off the cuspidal rim.
pub fn gaussian_curvature(chart: ChartId, [a, b]: [f64; 2], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let off_rim = |lo: f64, hi: f64, rim: f64| lo > rim || hi < rim;
    let w = 2.0 * h;
    let ok = match chart {
        ChartId::Uv => a - w > 0.0,
        ChartId::PhiV => a - w > 0.0 && a + w < PI && off_rim(a - w, a + w, FRAC_PI_2),
        ChartId::Pq => off_rim(a - w, a + w, 0.0),
        ChartId::AlphaBeta => off_rim(a + b - 2.0 * w, a + b + 2.0 * w, 0.0),
    };
    if !ok {
        return Err(Error::StencilOutOfDomain { x: a, y: b });
    }
    brioschi_curvature(|x, y| fundamental_form(chart, [x, y]), [a, b], h)
}

/// Triangulated lower funnel over `p in [p_min, 0]`, `q` in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunnelMesh {
    pub vertices: Vec<[f64; 3]>,
    /// `(p, q)` of each vertex.
    pub params: Vec<[f64; 2]>,
    pub faces: Vec<[usize; 3]>,
    pub np: usize,
    pub nq: usize,
}

/// `np` parallels from `p_min` up to the rim, `nq` meridians. Vertex `k`
/// has `p` index `k % np` and `q` index `k / np`.
pub fn funnel_mesh(p_min: f64, np: usize, nq: usize) -> Result<FunnelMesh> {
    if !(p_min < 0.0) || np < 2 || nq < 3 {
        return Err(Error::InvalidArgument(format!(
            "funnel mesh needs p_min < 0, np >= 2, nq >= 3 (got {p_min}, {np}, {nq})"
        )));
    }
    let params: Vec<[f64; 2]> = (0..nq)
        .flat_map(|j| {
            let q = std::f64::consts::TAU * j as f64 / nq as f64;
            (0..np).map(move |i| {
                // last parallel exactly on the rim
                let p = if i + 1 == np { 0.0 } else { p_min * (1.0 - i as f64 / (np - 1) as f64) };
                [p, q]
            })
        })
        .collect();
    let vertices = params
        .par_iter()
        .map(|&[p, q]| embed_pq(PQChart { p, q }).map(PseudospherePoint::to_array))
        .collect::<Result<Vec<_>>>()?;
    let mut faces = Vec::with_capacity(2 * (np - 1) * nq);
    for j in 0..nq {
        let jn = (j + 1) % nq;
        for i in 0..np - 1 {
            let (a, b, c, d) = (j * np + i, j * np + i + 1, jn * np + i, jn * np + i + 1);
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    Ok(FunnelMesh { vertices, params, faces, np, nq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: Form, b: Form) -> f64 {
        (0..2).flat_map(|i| (0..2).map(move |j| (a[i][j] - b[i][j]).abs())).fold(0.0, f64::max)
    }

    #[test]
    fn tractrix_examples() {
        let [x, z] = tractrix(FRAC_PI_2).unwrap();
        assert_eq!(x, -1.0);
        assert!(z.abs() < 1e-30);
        assert!(tractrix(0.0).is_err() && tractrix(PI).is_err());
        for phi in [0.1, 1.0, 2.0, 3.1] {
            assert_eq!(tractrix(phi).unwrap()[0].abs(), phi.sin());
        }
        assert!(tangent_length(FRAC_PI_2).is_err());
    }

    #[test]
    fn tangent_length_is_one() {
        assert_abs_diff_eq!(tangent_length(PI / 3.0).unwrap(), 1.0, epsilon = 1e-10);
        // independent route: intersect the secant through two nearby points with the axis
        let phi = PI / 3.0;
        let d = 1e-6;
        let [x0, z0] = tractrix(phi - d).unwrap();
        let [x1, z1] = tractrix(phi + d).unwrap();
        let [x, z] = tractrix(phi).unwrap();
        let slope = (z1 - z0) / (x1 - x0);
        let z_axis = z - slope * x;
        assert_abs_diff_eq!(x.hypot(z - z_axis), 1.0, epsilon = 1e-8);
    }

    proptest! {
        #[test]
        fn tangent_length_everywhere(phi in 0.01..3.13f64) {
            prop_assume!((phi - FRAC_PI_2).abs() > 1e-3);
            prop_assert!((tangent_length(phi).unwrap() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn u_phi_round_trip(u in 0.0..30.0f64) {
            let back = phi_to_u(u_to_phi(u).unwrap()).unwrap();
            prop_assert!((back - u).abs() <= 1e-12 * (1.0 + u));
        }

        #[test]
        fn phi_u_round_trip(phi in 1e-6..=FRAC_PI_2) {
            prop_assert!((u_to_phi(phi_to_u(phi).unwrap()).unwrap() - phi).abs() <= 1e-12);
        }

        #[test]
        fn phi_p_round_trip(p in -5.0..5.0f64) {
            prop_assert!((phi_to_p(soliton(p)).unwrap() - p).abs() <= 1e-12);
        }

        #[test]
        fn chart_round_trips(p in -5.0..-0.01f64, q in -4.0..4.0f64) {
            for via in [ChartId::PhiV, ChartId::AlphaBeta] {
                let there = chart_change(ChartId::Pq, via, [p, q]).unwrap();
                let back = chart_change(via, ChartId::Pq, there).unwrap();
                prop_assert!((back[0] - p).abs() <= 1e-12 && (back[1] - q).abs() <= 1e-12);
            }
        }

        #[test]
        fn uv_points_lie_on_surface(u in 0.0..8.0f64, v in -10.0..10.0f64) {
            let c = BeltramiChart::new(u, v).unwrap();
            let pt = embed_uv(c).unwrap();
            prop_assert!(pt.surface_residual() <= 1e-12 * (1.0 + pt.z.abs()));
            prop_assert!(pt.z >= 0.0);
        }

        #[test]
        fn pq_points_lie_on_surface(p in -6.0..=0.0f64, q in -10.0..10.0f64) {
            let pt = embed_pq(PQChart::new(p, q).unwrap()).unwrap();
            prop_assert!(pt.surface_residual() <= 1e-12 * (1.0 + pt.z.abs()));
            prop_assert!(pt.z <= 0.0);
        }
    }

    #[test]
    fn chart_change_examples() {
        assert_abs_diff_eq!(
            chart_change(ChartId::PhiV, ChartId::Pq, [FRAC_PI_2, 0.0]).unwrap()[0],
            0.0,
            epsilon = 1e-16
        );
        assert_eq!(chart_change(ChartId::Pq, ChartId::PhiV, [0.0, 0.0]).unwrap()[0], FRAC_PI_2);
        assert_eq!(chart_change(ChartId::AlphaBeta, ChartId::Pq, [1.0, -1.0]).unwrap(), [0.0, 2.0]);
        assert_eq!(u_to_phi(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(phi_to_u(FRAC_PI_2).unwrap(), 0.0);
        assert!(chart_change(ChartId::Pq, ChartId::Uv, [-1.0, 0.0]).is_err());
        assert!(chart_change(ChartId::PhiV, ChartId::Pq, [PI, 0.0]).is_err());
        assert!(u_to_phi(-0.1).is_err());
        // upper component round trip through every chart
        let start = [0.7, 0.4];
        let mut c = start;
        for (from, to) in [
            (ChartId::Uv, ChartId::Pq),
            (ChartId::Pq, ChartId::AlphaBeta),
            (ChartId::AlphaBeta, ChartId::PhiV),
            (ChartId::PhiV, ChartId::Uv),
        ] {
            c = chart_change(from, to, c).unwrap();
        }
        assert_abs_diff_eq!(c[0], start[0], epsilon = 1e-12);
        assert_abs_diff_eq!(c[1], start[1], epsilon = 1e-12);
    }

    #[test]
    fn embedding_examples() {
        let rim = embed_uv(BeltramiChart::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((rim.x.hypot(rim.y), rim.z), (1.0, 0.0));
        assert_eq!(embed_pq(PQChart::new(0.0, 0.0).unwrap()).unwrap().to_array(), [-1.0, 0.0, 0.0]);
        for q in [0.3, 2.0, -4.0] {
            let pt = embed_pq(PQChart::new(0.0, q).unwrap()).unwrap();
            assert_abs_diff_eq!(pt.x.hypot(pt.y), 1.0, epsilon = 1e-15);
            assert_eq!(pt.z, 0.0);
        }
        assert!(PQChart::new(0.1, 0.0).is_err());
        assert!(BeltramiChart::new(-1e-9, 0.0).is_err());
    }

    #[test]
    fn funnel_point_matches_the_other_charts() {
        let (p, q) = (-3.0f64, FRAC_PI_2);
        let pt = embed_pq(PQChart::new(p, q).unwrap()).unwrap();
        assert_abs_diff_eq!(pt.x, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(pt.y, 1.0 / 3f64.cosh(), epsilon = 1e-16);
        assert_abs_diff_eq!(pt.z, -3.0 + 3f64.tanh(), epsilon = 1e-15);
        // same point through (phi, v)
        let [phi, v] = chart_change(ChartId::Pq, ChartId::PhiV, [p, q]).unwrap();
        let alt = embed_phi_v(phi, v).unwrap();
        for (a, b) in pt.to_array().iter().zip(alt.to_array()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-13);
        }
        // and the mirror image of the Beltrami chart point with sin phi = e^{-u}
        let u = -(phi.sin().ln());
        let up = embed_uv(BeltramiChart::new(u, v).unwrap()).unwrap();
        assert_abs_diff_eq!(up.x, pt.x, epsilon = 1e-13);
        assert_abs_diff_eq!(up.y, pt.y, epsilon = 1e-13);
        assert_abs_diff_eq!(up.z, -pt.z, epsilon = 1e-12);
    }

    #[test]
    fn parallel_circumference() {
        let u = 2f64.ln();
        let n = 4096;
        let pts: Vec<[f64; 3]> = (0..=n)
            .map(|k| {
                embed_uv(BeltramiChart::new(u, std::f64::consts::TAU * k as f64 / n as f64).unwrap())
                    .unwrap()
                    .to_array()
            })
            .collect();
        let len: f64 = pts
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2) + (w[1][2] - w[0][2]).powi(2)).sqrt())
            .sum();
        assert_abs_diff_eq!(len, PI, epsilon = 1e-6);
    }

    #[test]
    fn form_examples() {
        assert_eq!(fundamental_form(ChartId::Uv, [0.0, 1.0]).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        let ab = fundamental_form(ChartId::AlphaBeta, [-0.3, phi_to_p(PI / 4.0).unwrap() + 0.3]).unwrap();
        assert!(max_diff(ab, [[1.0, 0.0], [0.0, 1.0]]) < 1e-15);
        let pv = fundamental_form(ChartId::PhiV, [PI / 3.0, 0.0]).unwrap();
        assert!(max_diff(pv, [[1.0 / 3.0, 0.0], [0.0, 0.75]]) < 1e-15);
        assert!(fundamental_form(ChartId::PhiV, [0.0, 0.0]).is_err());
        assert!(fundamental_form(ChartId::PhiV, [FRAC_PI_2, 0.0]).is_ok());
    }

    #[test]
    fn pullback_at_u1() {
        let m = metric_pullback(|u, v| embed_uv(BeltramiChart::new(u, v)?), [1.0, 0.3], 1e-5).unwrap();
        assert!(max_diff(m, [[1.0, 0.0], [0.0, (-2.0f64).exp()]]) < 1e-6, "{m:?}");
    }

    #[test]
    fn pullbacks_match_analytic_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let samples = [
                (ChartId::Uv, [rng.gen_range(0.05..4.0), rng.gen_range(-3.0..3.0)]),
                (ChartId::PhiV, [rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0)]),
                (ChartId::Pq, [rng.gen_range(-4.0..-0.05), rng.gen_range(-3.0..3.0)]),
                (ChartId::AlphaBeta, {
                    let p: f64 = rng.gen_range(-4.0..-0.05);
                    let q: f64 = rng.gen_range(-3.0..3.0);
                    [0.5 * (p + q), 0.5 * (p - q)]
                }),
            ];
            for (chart, c) in samples {
                let fd = metric_pullback(|a, b| embed(chart, [a, b]), c, 1e-5).unwrap();
                let exact = fundamental_form(chart, c).unwrap();
                assert!(max_diff(fd, exact) < 1e-6, "{chart:?} {c:?} {fd:?} {exact:?}");
            }
        }
    }

    #[test]
    fn brioschi_on_known_surfaces() {
        // unit sphere in geodesic polar coordinates: K = 1
        let sphere = |a: f64, _b: f64| Ok([[1.0, 0.0], [0.0, a.sin().powi(2)]]);
        assert_abs_diff_eq!(brioschi_curvature(sphere, [0.8, 0.1], 1e-3).unwrap(), 1.0, epsilon = 1e-6);
        // flat plane in skew coordinates
        let skew = |_a: f64, _b: f64| Ok([[1.0, 0.5], [0.5, 1.0]]);
        assert_eq!(brioschi_curvature(skew, [0.0, 0.0], 0.1).unwrap(), 0.0);
    }

    #[test]
    fn curvature_is_minus_one() {
        assert_eq!(revolution_curvature(0.7, RHO), -1.0);
        assert_eq!(revolution_curvature(3.0, -2.0), -0.25);
        let k = gaussian_curvature(ChartId::Uv, [1.2, 0.0], 1e-3).unwrap();
        assert_abs_diff_eq!(k, -1.0, epsilon = 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            for (chart, c) in [
                (ChartId::Uv, [rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0)]),
                (ChartId::PhiV, [rng.gen_range(0.2..1.4), rng.gen_range(-3.0..3.0)]),
                (ChartId::Pq, [rng.gen_range(-3.0..-0.1), rng.gen_range(-3.0..3.0)]),
                (ChartId::AlphaBeta, [rng.gen_range(-1.5..-0.1), rng.gen_range(-1.5..-0.1)]),
            ] {
                let k = gaussian_curvature(chart, c, 1e-3).unwrap();
                assert!((k + 1.0).abs() < 1e-6, "{chart:?} {c:?} {k}");
            }
        }
        // rescaled meridians
        let scaled = |u: f64, _v: f64| Ok([[1.0, 0.0], [0.0, parallel_radius(u, -2.0).powi(2)]]);
        assert_abs_diff_eq!(brioschi_curvature(scaled, [1.0, 0.0], 1e-3).unwrap(), -0.25, epsilon = 1e-7);
        let m = metric_pullback(|u, v| embed_uv_with(BeltramiChart::new(u, v)?, -2.0), [1.0, 0.2], 1e-5).unwrap();
        assert!(max_diff(m, scaled(1.0, 0.2).unwrap()) < 1e-6);
    }

    #[test]
    fn curvature_stencil_must_avoid_the_rim() {
        assert!(gaussian_curvature(ChartId::Uv, [0.0, 0.0], 1e-4).is_err());
        assert!(gaussian_curvature(ChartId::Pq, [-1.5e-4, 0.0], 1e-4).is_err());
        assert!(gaussian_curvature(ChartId::PhiV, [FRAC_PI_2, 0.0], 1e-4).is_err());
    }

    #[test]
    fn funnel_mesh_shape() {
        let m = funnel_mesh(-3.0, 31, 24).unwrap();
        assert_eq!((m.vertices.len(), m.faces.len()), (31 * 24, 2 * 30 * 24));
        for j in 0..24 {
            let v = m.vertices[j * 31 + 30];
            assert_abs_diff_eq!(v[0].hypot(v[1]), 1.0, epsilon = 1e-15);
            assert_eq!(v[2], 0.0);
        }
        assert!(m.faces.iter().flatten().all(|&k| k < m.vertices.len()));
        assert!(funnel_mesh(0.5, 4, 4).is_err());
    }
}
