//! Poisson kernel, horocyclic waves and the conical (Legendre) functions
//! obtained as their boundary averages.
//!
//! Boundary integrals use the normalised measure `d phi / 2 pi` and are
//! evaluated by the uniform trapezoid rule, which converges geometrically for
//! the periodic analytic integrands met here. Node counts are doubled until
//! two successive estimates agree.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hypmodels::{BoundaryPoint, DiskPoint, SU11Element};

/// Default distance from the rim inside which kernel evaluations are refused.
pub const DEFAULT_CLAMP: f64 = 1e-6;

/// `P(zeta, b) = (1 - |zeta|^2) / |b - zeta|^2`, refusing points with
/// `|zeta| > 1 - DEFAULT_CLAMP`.
pub fn poisson_kernel(zeta: DiskPoint, b: BoundaryPoint) -> Result<f64> {
    poisson_kernel_clamped(zeta, b, DEFAULT_CLAMP)
}

pub fn poisson_kernel_clamped(zeta: DiskPoint, b: BoundaryPoint, clamp: f64) -> Result<f64> {
    let m = zeta.modulus();
    if m > 1.0 - clamp {
        return Err(Error::Divergence { modulus: m, clamp });
    }
    let u = b.unit();
    // dividing by |u|^2 removes the rounding in |e^{i phi}| and makes P(0, b) = 1 exactly
    let gap = (u - zeta.to_complex()).norm_sqr() / u.norm_sqr();
    Ok((1.0 - m) * (1.0 + m) / gap)
}

/// Exponent and amplitude constant of a horocyclic wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub nu: Complex64,
    /// Set when `nu = 1/2 - i lambda`.
    pub lambda: Option<f64>,
    pub amplitude_const: Complex64,
}

impl WaveParams {
    /// Spectral form `nu = 1/2 - i lambda`, unit amplitude.
    pub fn spectral(lambda: f64) -> Self {
        Self { nu: Complex64::new(0.5, -lambda), lambda: Some(lambda), amplitude_const: Complex64::new(1.0, 0.0) }
    }

    pub fn exponent(nu: Complex64) -> Self {
        Self { nu, lambda: None, amplitude_const: Complex64::new(1.0, 0.0) }
    }

    pub fn with_amplitude(mut self, a: Complex64) -> Self {
        self.amplitude_const = a;
        self
    }

    /// `nu (nu - 1)`, the Laplace–Beltrami eigenvalue of the wave.
    pub fn eigenvalue(&self) -> Complex64 {
        self.nu * (self.nu - 1.0)
    }
}

/// `e^{nu <zeta, b>} = P(zeta, b)^nu`, taken as `exp(nu ln P)` with the real
/// logarithm of the positive kernel.
pub fn horocyclic_wave(zeta: DiskPoint, b: BoundaryPoint, nu: Complex64) -> Result<Complex64> {
    let lp = poisson_kernel(zeta, b)?.ln();
    Ok((nu * lp).exp())
}

/// One sample of `psi = A e^{nu <zeta, b>}` with its amplitude/phase split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: [f64; 2],
    pub value: Complex64,
    /// Unwrapped phase `arg A + Im(nu) <zeta, b>`.
    pub phase: f64,
    pub amplitude: f64,
}

pub fn field_sample(zeta: DiskPoint, b: BoundaryPoint, params: &WaveParams) -> Result<FieldSample> {
    let lp = poisson_kernel(zeta, b)?.ln();
    let a = params.amplitude_const;
    let amplitude = a.norm() * (params.nu.re * lp).exp();
    let phase = a.arg() + params.nu.im * lp;
    Ok(FieldSample { point: [zeta.xi, zeta.eta], value: a * (params.nu * lp).exp(), phase, amplitude })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Smallest node count accepted as converged.
    pub min_nodes: usize,
    /// Doubling stops here; reaching it without agreement is an error.
    pub max_nodes: usize,
    /// Relative agreement required between successive doublings.
    pub tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { min_nodes: 64, max_nodes: 1 << 16, tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub nodes: usize,
    /// `|I_N - I_{N/2}|` at the accepted level.
    pub change: f64,
}

/// Mean of a `2 pi`-periodic function, `(1/2pi) int_0^{2pi} f`, by the
/// trapezoid rule with node doubling. Each doubling only evaluates the new
/// midpoints.
pub fn periodic_mean<F>(f: F, opts: &QuadratureOptions) -> Result<QuadratureEstimate>
where
    F: Fn(f64) -> Complex64,
{
    let mut n = 8usize;
    let mut sum: Complex64 = (0..n).map(|k| f(TAU * k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    loop {
        let step = TAU / n as f64;
        let mids: Complex64 = (0..n).map(|k| f(step * (k as f64 + 0.5))).sum();
        sum += mids;
        n *= 2;
        let cur = sum / n as f64;
        let change = (cur - prev).norm();
        if n >= opts.min_nodes && change <= opts.tol * cur.norm().max(1.0) {
            return Ok(QuadratureEstimate { value: cur, nodes: n, change });
        }
        if n >= opts.max_nodes {
            return Err(Error::QuadratureNotConverged { nodes: n, change });
        }
        prev = cur;
    }
}

/// `P_{-nu}(cosh r) = (1/2pi) int (cosh r + sinh r cos phi)^{-nu} d phi`.
pub fn conical_function(nu: Complex64, r: f64) -> Result<Complex64> {
    conical_function_detailed(nu, r, &QuadratureOptions::default()).map(|q| q.value)
}

pub fn conical_function_detailed(nu: Complex64, r: f64, opts: &QuadratureOptions) -> Result<QuadratureEstimate> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("conical function needs r >= 0, got {r}")));
    }
    let (em, sh) = ((-r).exp(), r.sinh());
    periodic_mean(
        |phi| {
            // cosh r + sinh r cos phi = e^{-r} + 2 sinh r cos^2(phi/2), free of cancellation
            let c = (0.5 * phi).cos();
            let base = em + 2.0 * sh * c * c;
            (-nu * base.ln()).exp()
        },
        opts,
    )
}

/// `|P_{-1/2+i lambda}(cosh r) - P_{-1/2-i lambda}(cosh r)|`.
pub fn conical_symmetry_check(lambda: f64, r: f64) -> Result<f64> {
    let plus = conical_function(Complex64::new(0.5, -lambda), r)?;
    let minus = conical_function(Complex64::new(0.5, lambda), r)?;
    Ok((plus - minus).norm())
}

/// Boundary Jacobian `|d(g^{-1} . b) / db|` at `b = e^{i phi}`, i.e.
/// `|a - conj(c) e^{i phi}|^{-2}`.
pub fn boundary_jacobian(g: &SU11Element, phi: f64) -> f64 {
    1.0 / (g.a() - g.c().conj() * Complex64::from_polar(1.0, phi)).norm_sqr()
}

/// Spherical function `Phi_nu(g) = int_B |d(g^{-1} . b)/db|^nu db` by
/// periodic quadrature of the boundary Jacobian.
pub fn spherical_function(g: &SU11Element, nu: Complex64) -> Result<Complex64> {
    periodic_mean(|phi| (nu * boundary_jacobian(g, phi).ln()).exp(), &QuadratureOptions::default()).map(|q| q.value)
}

/// The same boundary average written with the Poisson kernel at `g . 0`.
pub fn spherical_function_poisson(g: &SU11Element, nu: Complex64) -> Result<Complex64> {
    let z = g.origin_image();
    // pre-check once so the closure below cannot fail
    poisson_kernel(z, BoundaryPoint::disk(0.0))?;
    periodic_mean(
        |phi| {
            let p = poisson_kernel(z, BoundaryPoint::Disk { phi }).unwrap_or(f64::NAN);
            (nu * p.ln()).exp()
        },
        &QuadratureOptions::default(),
    )
    .map(|q| q.value)
}

/// Five-point Laplacian scaled by a metric factor, with the domain check on
/// every node.
fn scaled_laplacian<T>(
    field: &Grid<T>,
    inside: impl Fn(f64, f64) -> bool,
    factor: impl Fn(f64, f64) -> f64 + Sync,
) -> Result<Grid<Option<T>>>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    field.check_nodes(inside)?;
    let inv_h2 = 1.0 / (field.h * field.h);
    Ok(field.stencil(|x, y, n| {
        let c = *n(0, 0);
        let lap = (*n(1, 0) + *n(-1, 0) + *n(0, 1) + *n(0, -1) - c * 4.0) * inv_h2;
        lap * factor(x, y)
    }))
}

/// `Delta_D = (1/4) (1 - xi^2 - eta^2)^2 (d_xi^2 + d_eta^2)` on a grid of the
/// disk. Every node must lie strictly inside the unit disk.
pub fn laplace_beltrami_disk<T>(field: &Grid<T>) -> Result<Grid<Option<T>>>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    scaled_laplacian(
        field,
        |x, y| x * x + y * y < 1.0,
        |x, y| {
            let w = 1.0 - x * x - y * y;
            0.25 * w * w
        },
    )
}

/// `Delta_H = y^2 (d_x^2 + d_y^2)` on a grid of the half-plane.
pub fn laplace_beltrami_halfplane<T>(field: &Grid<T>) -> Result<Grid<Option<T>>>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    scaled_laplacian(field, |_, y| y > 0.0, |_, y| y * y)
}

/// `max |L f - mu f|` over the unmasked nodes of `applied = L f`.
pub fn eigen_residual(field: &Grid<Complex64>, applied: &Grid<Option<Complex64>>, mu: Complex64) -> f64 {
    field.data.iter().zip(&applied.data).filter_map(|(f, lf)| lf.map(|lf| (lf - mu * f).norm())).fold(0.0, f64::max)
}

/// `max |L f / f - mu|`, the pointwise eigenvalue estimate error.
pub fn eigenvalue_error(field: &Grid<Complex64>, applied: &Grid<Option<Complex64>>, mu: Complex64) -> f64 {
    field.data.iter().zip(&applied.data).filter_map(|(f, lf)| lf.map(|lf| (lf / f - mu).norm())).fold(0.0, f64::max)
}
