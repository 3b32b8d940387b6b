//! Direct minimisation of the optical length `J = int ds / y` over polygonal
//! paths with fixed endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypmodels::HalfPlanePoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPath {
    vertices: Vec<HalfPlanePoint>,
}

impl PolyPath {
    pub fn new(vertices: Vec<HalfPlanePoint>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two vertices".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !(v.y > 0.0) || !v.x.is_finite()) {
            return Err(Error::Domain(format!("path vertex ({}, {}) is not in the half-plane", v.x, v.y)));
        }
        Ok(Self { vertices })
    }

    /// Straight Euclidean chord from `p0` to `p1` with `n_interior` equally
    /// spaced interior vertices.
    pub fn chord(p0: HalfPlanePoint, p1: HalfPlanePoint, n_interior: usize) -> Self {
        let m = n_interior + 1;
        let vertices = (0..=m)
            .map(|k| {
                let t = k as f64 / m as f64;
                HalfPlanePoint { x: p0.x + t * (p1.x - p0.x), y: p0.y + t * (p1.y - p0.y) }
            })
            .collect();
        Self { vertices }
    }

    pub fn vertices(&self) -> &[HalfPlanePoint] {
        &self.vertices
    }
}

// 8-point Gauss–Legendre rule on [0, 1].
const GL_T: [f64; 8] = [
    0.019855071751231912,
    0.10166676129318664,
    0.2372337950418355,
    0.4082826787521751,
    0.5917173212478248,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL_W: [f64; 8] = [
    0.050614268145188344,
    0.11119051722668717,
    0.15685332293894352,
    0.18134189168918088,
    0.18134189168918088,
    0.15685332293894352,
    0.11119051722668717,
    0.050614268145188344,
];

/// Largest `|dy| / y_min` allowed on one Gauss–Legendre panel.
const PANEL_RATIO: f64 = 0.25;

/// `S = int_0^1 dt / y(t)` for `y` linear from `y0` to `y1`, plus
/// `dS/dy0` and `dS/dy1`.
fn inverse_height_integral(y0: f64, y1: f64) -> (f64, f64, f64) {
    let dy = y1 - y0;
    let panels = ((dy.abs() / (PANEL_RATIO * y0.min(y1))).ceil() as usize).max(1);
    let width = 1.0 / panels as f64;
    let (mut s, mut d0, mut d1) = (0.0, 0.0, 0.0);
    for p in 0..panels {
        for (t, w) in GL_T.iter().zip(GL_W) {
            let tau = (p as f64 + t) * width;
            let y = y0 + tau * dy;
            let wy = w * width / y;
            s += wy;
            let g = wy / y;
            d0 -= g * (1.0 - tau);
            d1 -= g * tau;
        }
    }
    (s, d0, d1)
}

/// Hyperbolic length of the straight segment `p -> q`, by quadrature.
pub fn segment_length(p: HalfPlanePoint, q: HalfPlanePoint) -> f64 {
    let l = (q.x - p.x).hypot(q.y - p.y);
    if l == 0.0 {
        return 0.0;
    }
    l * inverse_height_integral(p.y, q.y).0
}

/// Discrete `J`, the sum of the hyperbolic lengths of the segments.
pub fn jacobi_length(path: &PolyPath) -> f64 {
    path.vertices.windows(2).map(|w| segment_length(w[0], w[1])).sum()
}

/// `J` and its gradient with respect to the flattened interior coordinates
/// `[x_1, y_1, x_2, y_2, ...]`.
fn value_and_gradient(p0: HalfPlanePoint, p1: HalfPlanePoint, z: &[f64], grad: &mut [f64]) -> Option<f64> {
    let n = z.len() / 2;
    let vertex = |k: usize| -> (f64, f64) {
        if k == 0 {
            (p0.x, p0.y)
        } else if k == n + 1 {
            (p1.x, p1.y)
        } else {
            (z[2 * k - 2], z[2 * k - 1])
        }
    };
    grad.iter_mut().for_each(|g| *g = 0.0);
    let mut total = 0.0;
    for k in 0..=n {
        let (ax, ay) = vertex(k);
        let (bx, by) = vertex(k + 1);
        if !(ay > 0.0 && by > 0.0) {
            return None;
        }
        let l = (bx - ax).hypot(by - ay);
        if l == 0.0 {
            continue;
        }
        let (s, d0, d1) = inverse_height_integral(ay, by);
        total += l * s;
        let (ux, uy) = ((bx - ax) / l, (by - ay) / l);
        if k >= 1 {
            grad[2 * k - 2] -= ux * s;
            grad[2 * k - 1] += -uy * s + l * d0;
        }
        if k < n {
            grad[2 * k] += ux * s;
            grad[2 * k + 1] += uy * s + l * d1;
        }
    }
    Some(total)
}

/// Block-tridiagonal approximation of the Hessian of `J`, one 2x2 block per
/// interior vertex, estimated by central differences of the gradient. Every
/// third vertex is perturbed at once since a vertex only couples to its
/// neighbours.
struct BandedHessian {
    diag: Vec<[f64; 4]>,
    upper: Vec<[f64; 4]>,
}

/// Factored `BandedHessian + shift I`, kept as the pivot blocks `S_k`.
struct BandedFactor {
    upper: Vec<[f64; 4]>,
    pivots: Vec<[f64; 4]>,
}

fn inv2(m: &[f64; 4]) -> Option<[f64; 4]> {
    let det = m[0] * m[3] - m[1] * m[2];
    // positive definite 2x2 block
    (m[0] > 0.0 && det > 0.0).then(|| [m[3] / det, -m[1] / det, -m[2] / det, m[0] / det])
}

fn mul2(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

fn transpose2(a: &[f64; 4]) -> [f64; 4] {
    [a[0], a[2], a[1], a[3]]
}

fn apply2(a: &[f64; 4], v: [f64; 2]) -> [f64; 2] {
    [a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]]
}

impl BandedHessian {
    fn estimate(p0: HalfPlanePoint, p1: HalfPlanePoint, z: &[f64]) -> Option<Self> {
        let n = z.len() / 2;
        let mut full = vec![[0.0f64; 4]; n];
        let mut upper = vec![[0.0f64; 4]; n.saturating_sub(1)];
        let mut lower = vec![[0.0f64; 4]; n.saturating_sub(1)];
        let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
        let (mut gp, mut gm) = (vec![0.0; z.len()], vec![0.0; z.len()]);
        let step = |k: usize| 1e-6 * z[2 * k + 1];
        for colour in 0..3 {
            for c in 0..2 {
                zp.copy_from_slice(z);
                zm.copy_from_slice(z);
                for k in (colour..n).step_by(3) {
                    zp[2 * k + c] += step(k);
                    zm[2 * k + c] -= step(k);
                }
                value_and_gradient(p0, p1, &zp, &mut gp)?;
                value_and_gradient(p0, p1, &zm, &mut gm)?;
                for k in (colour..n).step_by(3) {
                    let col = |m: usize, r: usize| (gp[2 * m + r] - gm[2 * m + r]) / (2.0 * step(k));
                    full[k][c] = col(k, 0);
                    full[k][2 + c] = col(k, 1);
                    if k + 1 < n {
                        // rows of vertex k+1, column (k, c): lower block
                        lower[k][c] = col(k + 1, 0);
                        lower[k][2 + c] = col(k + 1, 1);
                    }
                    if k >= 1 {
                        // rows of vertex k-1, column (k, c): upper block of k-1
                        upper[k - 1][c] = col(k - 1, 0);
                        upper[k - 1][2 + c] = col(k - 1, 1);
                    }
                }
            }
        }
        let diag = full
            .iter()
            .map(|m| {
                let o = 0.5 * (m[1] + m[2]);
                [m[0], o, o, m[3]]
            })
            .collect();
        // symmetrise: upper[k] is H[k][k+1] and lower[k]^T estimates the same block
        let upper = upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| {
                let lt = transpose2(l);
                [0.5 * (u[0] + lt[0]), 0.5 * (u[1] + lt[1]), 0.5 * (u[2] + lt[2]), 0.5 * (u[3] + lt[3])]
            })
            .collect();
        Some(Self { diag, upper })
    }

    fn scale(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d[0].abs()).max(d[3].abs()))
    }

    /// Block LDL^T of `H + damping * scale * I`, raising `damping` until every
    /// pivot is positive definite.
    fn factor(&self, damping: &mut f64) -> Option<BandedFactor> {
        let scale = self.scale();
        for _ in 0..40 {
            if let Some(f) = self.factor_shifted(*damping * scale) {
                return Some(f);
            }
            *damping = (*damping * 4.0).max(1e-12);
        }
        None
    }

    fn factor_shifted(&self, shift: f64) -> Option<BandedFactor> {
        let mut pivots: Vec<[f64; 4]> = Vec::with_capacity(self.diag.len());
        for (k, d) in self.diag.iter().enumerate() {
            let mut s = [d[0] + shift, d[1], d[2], d[3] + shift];
            if k > 0 {
                let e = &self.upper[k - 1];
                let corr = mul2(&transpose2(e), &mul2(&inv2(&pivots[k - 1])?, e));
                for i in 0..4 {
                    s[i] -= corr[i];
                }
            }
            inv2(&s)?;
            pivots.push(s);
        }
        Some(BandedFactor { upper: self.upper.clone(), pivots })
    }
}

impl BandedFactor {
    /// Solves `(H + shift I) x = r` in place.
    fn solve(&self, r: &mut [f64]) {
        let n = self.pivots.len();
        let inv: Vec<[f64; 4]> = self.pivots.iter().map(|s| inv2(s).expect("checked when factoring")).collect();
        let mut w: Vec<[f64; 2]> = r.chunks(2).map(|c| [c[0], c[1]]).collect();
        for k in 1..n {
            let t = apply2(&transpose2(&self.upper[k - 1]), apply2(&inv[k - 1], w[k - 1]));
            w[k] = [w[k][0] - t[0], w[k][1] - t[1]];
        }
        let mut x = vec![[0.0; 2]; n];
        for k in (0..n).rev() {
            let mut rhs = w[k];
            if k + 1 < n {
                let t = apply2(&self.upper[k], x[k + 1]);
                rhs = [rhs[0] - t[0], rhs[1] - t[1]];
            }
            x[k] = apply2(&inv[k], rhs);
        }
        for (c, v) in r.chunks_mut(2).zip(x) {
            c[0] = v[0];
            c[1] = v[1];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiOptions {
    /// Stop when the largest gradient component falls below this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Number of correction pairs kept by L-BFGS.
    pub memory: usize,
    /// Iterations between re-estimates of the banded preconditioner.
    pub refresh: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iterations: 20_000, memory: 16, refresh: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMinimum {
    pub path: PolyPath,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// `J` after every accepted iteration, starting with the chord.
    pub history: Vec<f64>,
    /// Stopped because further decrease is below floating-point resolution
    /// rather than by the gradient test.
    pub precision_limited: bool,
}

/// Minimises the discrete `J` over the interior vertices by L-BFGS with an
/// Armijo backtracking search, starting from the straight chord. The initial
/// inverse Hessian of the two-loop recursion is a banded Hessian estimate,
/// refreshed periodically; without it the stiff normal modes and the nearly
/// free sliding of vertices along the path make plain L-BFGS crawl. Trial
/// points that leave the half-plane are treated as infinitely long.
pub fn minimize_jacobi(
    p0: HalfPlanePoint,
    p1: HalfPlanePoint,
    n_interior: usize,
    opts: &JacobiOptions,
) -> Result<JacobiMinimum> {
    if (p0.x - p1.x).hypot(p0.y - p1.y) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let chord = PolyPath::chord(p0, p1, n_interior);
    let mut z: Vec<f64> = chord.vertices[1..=n_interior].iter().flat_map(|v| [v.x, v.y]).collect();
    let dim = z.len();
    let mut g = vec![0.0; dim];
    let mut f = value_and_gradient(p0, p1, &z, &mut g).expect("chord lies in the half-plane");
    let mut history = vec![f];
    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut trial = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut iterations = 0;
    let mut stalls = 0;
    let mut precision_limited = false;
    let mut idle = 0;
    let mut hessian: Option<BandedHessian> = None;
    // Levenberg–Marquardt damping of the preconditioner, relative to its scale
    let mut damping = 1e-3;

    while inf_norm(&g) > opts.tol {
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged { iterations, gradient_norm: inf_norm(&g) });
        }
        iterations += 1;

        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut alpha = vec![0.0; s_hist.len()];
        for i in (0..s_hist.len()).rev() {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            alpha[i] = rho * dot(&s_hist[i], &d);
            d.iter_mut().zip(&y_hist[i]).for_each(|(di, yi)| *di -= alpha[i] * yi);
        }
        if (iterations - 1) % opts.refresh.max(1) == 0 || hessian.is_none() {
            hessian = BandedHessian::estimate(p0, p1, &z);
        }
        let precond = hessian.as_ref().and_then(|h| h.factor(&mut damping));
        if let Some(p) = &precond {
            p.solve(&mut d);
        } else if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|di| *di *= gamma);
        } else {
            // largest move is 1% of the lowest interior height
            let scale = 1e-2 * z.iter().skip(1).step_by(2).fold(f64::INFINITY, |m, &y| m.min(y)) / inf_norm(&d);
            d.iter_mut().for_each(|di| *di *= scale);
        }
        for i in 0..s_hist.len() {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            let beta = rho * dot(&y_hist[i], &d);
            d.iter_mut().zip(&s_hist[i]).for_each(|(di, si)| *di += (alpha[i] - beta) * si);
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            // not a descent direction: restart from steepest descent
            s_hist.clear();
            y_hist.clear();
            d = g.iter().map(|x| -x).collect();
            slope = dot(&g, &d);
        }
        // rounding in a sum of n + 1 positive terms
        let resolution = f64::EPSILON * f.abs() * (n_interior + 1) as f64;
        let mut step = 1.0f64;
        let mut accepted = None;
        while step > 1e-20 {
            trial.iter_mut().zip(&z).zip(&d).for_each(|((t, zi), di)| *t = zi + step * di);
            if let Some(ft) = value_and_gradient(p0, p1, &trial, &mut g_new) {
                // below the resolution of f, settle for no increase
                let predicted = 1e-4 * step * slope;
                if ft <= f + predicted || (predicted.abs() < resolution && ft <= f) {
                    accepted = Some(ft);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(f_new) = accepted else {
            // rounding floor reached before the gradient test
            stalls += 1;
            if stalls > 3 {
                return Err(Error::NotConverged { iterations, gradient_norm: inf_norm(&g) });
            }
            s_hist.clear();
            y_hist.clear();
            continue;
        };
        stalls = 0;
        damping = if step == 1.0 { (damping * 0.25).max(1e-12) } else { (damping * 4.0).min(1.0) };
        let s: Vec<f64> = d.iter().map(|di| step * di).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        if opts.memory > 0 && dot(&s, &y) > 1e-300 {
            if s_hist.len() == opts.memory {
                s_hist.remove(0);
                y_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(y);
        }
        z.copy_from_slice(&trial);
        g.copy_from_slice(&g_new);
        // progress below the resolution of f for several iterations in a row
        // means the minimum is reached to working precision
        idle = if f - f_new <= resolution { idle + 1 } else { 0 };
        f = f_new;
        history.push(f);
        if idle >= 5 {
            precision_limited = true;
            break;
        }
    }

    let mut vertices = Vec::with_capacity(n_interior + 2);
    vertices.push(p0);
    vertices.extend(z.chunks(2).map(|c| HalfPlanePoint { x: c[0], y: c[1] }));
    vertices.push(p1);
    Ok(JacobiMinimum {
        path: PolyPath { vertices },
        value: f,
        iterations,
        gradient_norm: inf_norm(&g),
        precision_limited,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    /// Closed form of `int ds / y` along a straight segment.
    fn exact_segment(p: HalfPlanePoint, q: HalfPlanePoint) -> f64 {
        let l = (q.x - p.x).hypot(q.y - p.y);
        let dy = q.y - p.y;
        if dy.abs() < 1e-12 * p.y {
            l / p.y
        } else {
            l * (q.y / p.y).ln() / dy
        }
    }

    #[test]
    fn segment_quadrature_matches_closed_form() {
        for (a, b) in [((0.0, 1.0), (1.0, 1e-4)), ((0.3, 0.2), (-2.0, 5.0)), ((0.0, 1.0), (3.0, 1.0))] {
            let (p, q) = (pt(a.0, a.1), pt(b.0, b.1));
            let e = exact_segment(p, q);
            assert!((segment_length(p, q) - e).abs() < 1e-13 * e, "{a:?} {b:?}");
        }
    }

    #[test]
    fn vertical_path_and_degenerate_path() {
        let path = PolyPath::new(vec![pt(0.0, 0.2), pt(0.0, 3.0)]).unwrap();
        assert_abs_diff_eq!(jacobi_length(&path), 15f64.ln(), epsilon = 1e-14);
        let p = pt(0.4, 0.4);
        assert_eq!(jacobi_length(&PolyPath::new(vec![p, p]).unwrap()), 0.0);
        assert!(PolyPath::new(vec![p]).is_err());
        assert!(PolyPath::new(vec![p, HalfPlanePoint { x: 0.0, y: 0.0 }]).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p0 = pt(-0.7, 0.7);
        let p1 = pt(0.7, 0.7);
        let z = vec![-0.3, 0.8, 0.1, 0.95, 0.4, 0.75];
        let mut g = vec![0.0; 6];
        value_and_gradient(p0, p1, &z, &mut g).unwrap();
        let mut scratch = vec![0.0; 6];
        for i in 0..6 {
            let h = 1e-6;
            let mut zp = z.clone();
            zp[i] += h;
            let mut zm = z.clone();
            zm[i] -= h;
            let fd = (value_and_gradient(p0, p1, &zp, &mut scratch).unwrap()
                - value_and_gradient(p0, p1, &zm, &mut scratch).unwrap())
                / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "component {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn vertical_endpoints_stay_vertical() {
        let m = minimize_jacobi(pt(0.5, 0.1), pt(0.5, 2.0), 16, &JacobiOptions::default()).unwrap();
        assert!(m.path.vertices().iter().all(|v| v.x == 0.5));
        assert_abs_diff_eq!(m.value, 20f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn history_is_monotone() {
        let m = minimize_jacobi(pt(-0.9, 0.3), pt(0.8, 0.2), 24, &JacobiOptions::default()).unwrap();
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(m.gradient_norm <= 1e-9 || (m.precision_limited && m.gradient_norm <= 1e-7), "{}", m.gradient_norm);
        let exact = pt(-0.9, 0.3).distance(pt(0.8, 0.2));
        assert!(m.value >= exact && m.value - exact < 5e-3, "{} {}", m.value, exact);
    }

    #[test]
    fn coincident_endpoints_rejected() {
        assert!(minimize_jacobi(pt(0.0, 1.0), pt(0.0, 1.0), 4, &JacobiOptions::default()).is_err());
    }
}
