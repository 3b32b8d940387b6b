//! Canonical ray equations of `H = y^2 (px^2 + py^2) / 2` integrated with an
//! adaptive Dormand–Prince 5(4) pair.
//!
//! The local error test is invariant under the dilations `z -> k z + t` that
//! are isometries of the half-plane: position errors are measured in units of
//! `y` and momentum errors in units of `|p|`. A ray that dives towards the
//! real axis is therefore resolved with the same hyperbolic accuracy at every
//! height.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypmodels::{Geodesic, HalfPlanePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl RayState {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::Domain(format!("ray start needs y > 0, got ({x}, {y})")));
        }
        if !(px.is_finite() && py.is_finite()) || px == 0.0 && py == 0.0 {
            return Err(Error::InvalidArgument("ray momentum must be finite and nonzero".into()));
        }
        Ok(Self { x, y, px, py })
    }

    /// Unit-speed state at `(x, y)` heading at Euclidean angle `alpha` from
    /// the positive x-axis.
    pub fn from_direction(x: f64, y: f64, alpha: f64) -> Result<Self> {
        Self::new(x, y, alpha.cos() / y, alpha.sin() / y)
    }

    pub fn hamiltonian(&self) -> f64 {
        0.5 * self.y * self.y * (self.px * self.px + self.py * self.py)
    }

    /// Momenta rescaled so that `H = 1/2`, i.e. unit hyperbolic speed.
    pub fn normalized(&self) -> Self {
        let k = 1.0 / (self.y * self.px.hypot(self.py));
        Self { px: self.px * k, py: self.py * k, ..*self }
    }

    /// Graph slope `y' = py / px`; `None` on a vertical ray.
    pub fn slope(&self) -> Option<f64> {
        (self.px != 0.0).then(|| self.py / self.px)
    }

    pub fn direction(&self) -> f64 {
        self.py.atan2(self.px)
    }

    pub fn point(&self) -> HalfPlanePoint {
        HalfPlanePoint { x: self.x, y: self.y }
    }

    /// Geodesic tangent to the state: the circle centred at
    /// `x + y py / px` of radius `y |p| / |px|`, or a vertical line.
    pub fn geodesic(&self) -> Geodesic {
        let p = self.px.hypot(self.py);
        if self.px.abs() <= 1e-14 * p {
            Geodesic::HalfPlaneVertical { x0: self.x }
        } else {
            Geodesic::HalfPlaneCircle { x0: self.x + self.y * self.py / self.px, radius: self.y * p / self.px.abs() }
        }
    }

    fn rhs(&self) -> [f64; 4] {
        let y2 = self.y * self.y;
        let p2 = self.px * self.px + self.py * self.py;
        [y2 * self.px, y2 * self.py, 0.0, -self.y * p2]
    }

    fn axpy(&self, h: f64, terms: &[(f64, &[f64; 4])]) -> Self {
        let mut s = [self.x, self.y, self.px, self.py];
        for (c, k) in terms {
            for i in 0..4 {
                s[i] += h * c * k[i];
            }
        }
        Self { x: s[0], y: s[1], px: s[2], py: s[3] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    /// Hyperbolic arclength from the start.
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl RaySample {
    pub fn state(&self) -> RayState {
        RayState { x: self.x, y: self.y, px: self.px, py: self.py }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Relative local error tolerance per unit arclength.
    pub tol: f64,
    /// Hyperbolic step length below which the integration gives up.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { tol: 1e-10, min_step: 1e-12, max_steps: 1_000_000 }
    }
}

/// Samples plus conservation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub samples: Vec<RaySample>,
    /// `max |H - 1/2|` over accepted steps.
    pub hamiltonian_drift: f64,
    /// `max |px - px(0)|` over accepted steps.
    pub px_drift: f64,
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// fifth- minus fourth-order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// One trial step from `s0` with derivative `k1` already known. Returns the
/// fifth-order state, its derivative and the scaled error norm.
fn dp_step(s0: &RayState, k1: &[f64; 4], h: f64, tol: f64) -> (RayState, [f64; 4], f64) {
    let k2 = s0.axpy(h, &[(A2[0], k1)]).rhs();
    let k3 = s0.axpy(h, &[(A3[0], k1), (A3[1], &k2)]).rhs();
    let k4 = s0.axpy(h, &[(A4[0], k1), (A4[1], &k2), (A4[2], &k3)]).rhs();
    let k5 = s0.axpy(h, &[(A5[0], k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]).rhs();
    let k6 = s0.axpy(h, &[(A6[0], k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)]).rhs();
    let next = s0.axpy(h, &[(B5[0], k1), (B5[2], &k3), (B5[3], &k4), (B5[4], &k5), (B5[5], &k6)]);
    let k7 = next.rhs();
    let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = [0.0; 4];
    for (e, k) in E.iter().zip(ks) {
        for i in 0..4 {
            err[i] += h * e * k[i];
        }
    }
    // error per unit step: the local bound scales with h, so the global error
    // over arclength s stays near s * tol instead of growing with the step count
    let pos = tol * h * s0.y.min(next.y.abs());
    let mom = tol * h * s0.px.hypot(s0.py);
    let norm = (err[0].abs() / pos).max(err[1].abs() / pos).max(err[2].abs() / mom).max(err[3].abs() / mom);
    (next, k7, if next.y > 0.0 { norm } else { f64::INFINITY })
}

/// Integrates from `start` to arclength `s_max`, landing exactly on every
/// value of `stops` (sorted, within `(0, s_max]`). `record_all` also keeps
/// every accepted step.
fn integrate(start: RayState, s_max: f64, opts: &TraceOptions, stops: &[f64], record_all: bool) -> Result<Trace> {
    if !(s_max >= 0.0 && s_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("arclength must be finite and >= 0, got {s_max}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let start = RayState::new(start.x, start.y, start.px, start.py)?.normalized();
    let sample = |s: f64, st: &RayState| RaySample { s, x: st.x, y: st.y, px: st.px, py: st.py };
    let mut trace = Trace {
        samples: vec![sample(0.0, &start)],
        hamiltonian_drift: (start.hamiltonian() - 0.5).abs(),
        px_drift: 0.0,
        accepted: 0,
        rejected: 0,
    };
    let mut state = start;
    let mut k1 = state.rhs();
    let mut s = 0.0;
    // (tol)^{1/4} is the natural first guess for a unit-speed flow
    let mut h = opts.tol.powf(0.25).min(0.1);
    let mut next_stop = stops.iter().copied().peekable();
    while s < s_max {
        if trace.accepted + trace.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { s, y: state.y });
        }
        let target = next_stop.peek().copied().unwrap_or(s_max).min(s_max);
        let clipped = (target - s) <= h;
        let step = if clipped { target - s } else { h };
        let (cand, k7, err) = dp_step(&state, &k1, step, opts.tol);
        if err <= 1.0 {
            state = cand;
            k1 = k7;
            s = if clipped { target } else { s + step };
            trace.accepted += 1;
            trace.hamiltonian_drift = trace.hamiltonian_drift.max((state.hamiltonian() - 0.5).abs());
            trace.px_drift = trace.px_drift.max((state.px - start.px).abs());
            let at_stop = clipped && next_stop.peek().is_some_and(|&t| t <= s_max);
            if at_stop {
                next_stop.next();
            }
            if record_all || at_stop {
                trace.samples.push(sample(s, &state));
            }
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.25)).clamp(0.2, 5.0) };
            if !clipped {
                h = step * grow;
            }
        } else {
            let shrink = if err.is_finite() { (0.9 * err.powf(-0.25)).clamp(0.1, 0.9) } else { 0.1 };
            h = step * shrink;
            trace.rejected += 1;
        }
        if h < opts.min_step && s < s_max {
            return Err(Error::StepUnderflow { s, y: state.y });
        }
    }
    Ok(trace)
}

/// Traces the unit-speed geodesic through `start` (momenta rescaled to
/// `H = 1/2`) up to arclength `s_max`, keeping every accepted step.
pub fn trace_geodesic(start: RayState, s_max: f64, tol: f64) -> Result<Trace> {
    integrate(start, s_max, &TraceOptions { tol, ..Default::default() }, &[], true)
}

/// As [`trace_geodesic`] but returns `n + 1` samples at equally spaced
/// arclengths `k s_max / n`; steps are clipped to land on them exactly.
pub fn trace_geodesic_sampled(start: RayState, s_max: f64, n: usize, opts: &TraceOptions) -> Result<Trace> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample interval".into()));
    }
    let stops: Vec<f64> = (1..=n).map(|k| s_max * k as f64 / n as f64).collect();
    integrate(start, s_max, opts, &stops, false)
}

/// Independent rays traced in parallel, results in input order.
pub fn trace_bundle(starts: &[RayState], s_max: f64, n: usize, opts: &TraceOptions) -> Vec<Result<Trace>> {
    starts.par_iter().map(|st| trace_geodesic_sampled(*st, s_max, n, opts)).collect()
}
