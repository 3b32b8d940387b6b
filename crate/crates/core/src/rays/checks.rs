//! Pointwise and grid checks on rays, phases and amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hypmodels::Geodesic;

/// `y y'' + y'^2 + 1`, which vanishes on extremals of `int sqrt(1 + y'^2) / y dx`.
pub fn el_residual(y: f64, yp: f64, ypp: f64) -> f64 {
    y * ypp + yp * yp + 1.0
}

/// [`el_residual`] with `y'` and `y''` from central differences of samples
/// `ys` on a uniform abscissa of spacing `h`. Returns one value per interior
/// sample.
pub fn el_residual_fd(ys: &[f64], h: f64) -> Result<Vec<f64>> {
    if ys.len() < 3 || !(h > 0.0) {
        return Err(Error::InvalidArgument("need at least three samples and h > 0".into()));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0)) {
        return Err(Error::Domain(format!("graph sample y = {y} is not positive")));
    }
    Ok(ys
        .windows(3)
        .map(|w| {
            let yp = (w[2] - w[0]) / (2.0 * h);
            let ypp = (w[2] - 2.0 * w[1] + w[0]) / (h * h);
            el_residual(w[1], yp, ypp)
        })
        .collect())
}

/// `F_{y'y'} = 1 / (y (1 + y'^2)^{3/2})`, positive everywhere in the
/// half-plane.
pub fn weierstrass_check(y: f64, yp: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Weierstrass condition needs y > 0, got {y}")));
    }
    let s = 1.0 + yp * yp;
    Ok(1.0 / (y * s * s.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonPhysicalReason {
    /// Vertical lines leave the strip `0 < y <= 1`.
    Vertical,
    /// Half-circles of radius above one leave the strip.
    RadiusExceedsOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhysicalVerdict {
    pub physical: bool,
    pub reason: Option<NonPhysicalReason>,
}

/// Rays of the medium `n = 1/y >= 1` are the half-circles with `R <= 1`.
pub fn is_physical_ray(g: &Geodesic) -> Result<PhysicalVerdict> {
    let reason = match g.to_halfplane()? {
        Geodesic::HalfPlaneCircle { radius, .. } if radius <= 1.0 => None,
        Geodesic::HalfPlaneCircle { .. } => Some(NonPhysicalReason::RadiusExceedsOne),
        _ => Some(NonPhysicalReason::Vertical),
    };
    Ok(PhysicalVerdict { physical: reason.is_none(), reason })
}

/// Coordinate model a phase grid is sampled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// `(xi, eta)` in the unit disk, `ds = 2 |d zeta| / (1 - |zeta|^2)`.
    Disk,
    /// `(x, y)` with `y > 0`, `ds = |dz| / y`.
    HalfPlane,
    /// Pseudosphere `(u, v)` with `u >= 0`, `ds^2 = du^2 + e^{-2u} dv^2`.
    Beltrami,
}

impl Model {
    fn inside(self, a: f64, b: f64) -> bool {
        match self {
            Model::Disk => a * a + b * b < 1.0,
            Model::HalfPlane => b > 0.0,
            Model::Beltrami => a >= 0.0,
        }
    }

    /// Inverse metric `(g^11, g^22)`; all three are diagonal.
    fn inverse_metric(self, a: f64, b: f64) -> (f64, f64) {
        match self {
            Model::Disk => {
                let w = 0.5 * (1.0 - a * a - b * b);
                (w * w, w * w)
            }
            Model::HalfPlane => (b * b, b * b),
            Model::Beltrami => (1.0, (2.0 * a).exp()),
        }
    }
}

/// `g^{ij} d_i Phi d_j Phi - 1` by central differences; edge nodes are masked.
pub fn eikonal_residual(phase: &Grid<f64>, model: Model) -> Result<Grid<Option<f64>>> {
    phase.check_nodes(|a, b| model.inside(a, b))?;
    let inv_2h = 0.5 / phase.h;
    Ok(phase.stencil(|a, b, n| {
        let da = (n(1, 0) - n(-1, 0)) * inv_2h;
        let db = (n(0, 1) - n(0, -1)) * inv_2h;
        let (g11, g22) = model.inverse_metric(a, b);
        g11 * da * da + g22 * db * db - 1.0
    }))
}

/// Direction of travel of a radial pseudosphere wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `psi_pm(u) = C e^{u/2} e^{-/+ i lambda u}` on the pseudosphere, `u >= 0`.
pub fn transport_amplitude(u: f64, sign: Sign, lambda: f64, c: Complex64) -> Complex64 {
    c * Complex64::from_polar((0.5 * u).exp(), -sign.value() * lambda * u)
}

/// `|psi|^2 sqrt(g)` with `sqrt(g) = e^{-u}`.
pub fn transport_flux(psi: Complex64, u: f64) -> f64 {
    psi.norm_sqr() * (-u).exp()
}

/// Residual of the transport law `2 <grad Phi, grad A> + A Delta Phi = 0`
/// for the phase `Phi = +/- u`, where `Delta Phi = -/+ 1`. `amplitude` is
/// differentiated by central differences of step `h`.
pub fn transport_residual(amplitude: impl Fn(f64) -> f64, sign: Sign, u: f64, h: f64) -> f64 {
    let da = (amplitude(u + h) - amplitude(u - h)) / (2.0 * h);
    sign.value() * (2.0 * da - amplitude(u))
}
