//! The isometry group SU(1,1) of the disk and its Cartan decomposition
//! `g = k_theta a_r k_phi`.
//!
//! An element is the matrix `[[a, c], [conj(c), conj(a)]]` with
//! `|a|^2 - |c|^2 = 1`, acting by `zeta -> (a zeta + c) / (conj(c) zeta + conj(a))`.
//! The one-parameter subgroups are
//!
//! ```text
//! k_theta = diag(e^{i theta/2}, e^{-i theta/2})      0 <= theta < 4 pi
//! a_r     = [[cosh r/2, sinh r/2], [sinh r/2, cosh r/2]]
//! ```
//!
//! so that `k_theta a_r k_phi` has `a = e^{i(theta+phi)/2} cosh(r/2)` and
//! `c = e^{i(theta-phi)/2} sinh(r/2)`.

use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::point::{normalize_angle, DiskPoint};
use super::EPS_ALG;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU11Element {
    a: Complex64,
    c: Complex64,
}

/// Factors of the Cartan decomposition, `theta in [0, 4 pi)`, `r >= 0`,
/// `phi in [0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanFactors {
    pub theta: f64,
    pub r: f64,
    pub phi: f64,
}

impl SU11Element {
    pub const IDENTITY: SU11Element =
        SU11Element { a: Complex64 { re: 1.0, im: 0.0 }, c: Complex64 { re: 0.0, im: 0.0 } };

    /// Validates `| |a|^2 - |c|^2 - 1 | <= EPS_ALG`.
    pub fn new(a: Complex64, c: Complex64) -> Result<Self> {
        Self::with_tolerance(a, c, EPS_ALG)
    }

    pub fn with_tolerance(a: Complex64, c: Complex64, tol: f64) -> Result<Self> {
        let residual = a.norm_sqr() - c.norm_sqr() - 1.0;
        if !residual.is_finite() || residual.abs() > tol {
            return Err(Error::Constraint { residual });
        }
        Ok(Self { a, c })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn constraint_residual(&self) -> f64 {
        self.a.norm_sqr() - self.c.norm_sqr() - 1.0
    }

    /// `k_theta`.
    pub fn rotation(theta: f64) -> Self {
        Self { a: Complex64::from_polar(1.0, 0.5 * theta), c: Complex64::new(0.0, 0.0) }
    }

    /// `a_r`.
    pub fn boost(r: f64) -> Self {
        let h = 0.5 * r;
        Self { a: Complex64::new(h.cosh(), 0.0), c: Complex64::new(h.sinh(), 0.0) }
    }

    /// `k_theta a_r k_phi`, assembled in closed form.
    pub fn from_cartan(f: CartanFactors) -> Self {
        let h = 0.5 * f.r;
        Self {
            a: Complex64::from_polar(h.cosh(), 0.5 * (f.theta + f.phi)),
            c: Complex64::from_polar(h.sinh(), 0.5 * (f.theta - f.phi)),
        }
    }

    /// The element `zeta -> (zeta - p) / (1 - conj(p) zeta)` sending `p` to 0.
    pub fn moving_to_origin(p: DiskPoint) -> Self {
        let w = p.to_complex();
        let s = 1.0 / ((1.0 - p.modulus()) * (1.0 + p.modulus())).sqrt();
        Self { a: Complex64::new(s, 0.0), c: -w * s }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.conj(), c: -self.c }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.c], [self.c.conj(), self.a.conj()]]
    }

    #[inline]
    pub(crate) fn act_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.c) / (self.c.conj() * z + self.a.conj())
    }

    /// Action on the disk.
    pub fn act(&self, zeta: DiskPoint) -> Result<DiskPoint> {
        DiskPoint::from_complex(self.act_complex(zeta.to_complex()))
    }

    /// Action on the boundary circle, returning the image angle.
    pub fn act_boundary(&self, phi: f64) -> f64 {
        let w = self.act_complex(Complex64::from_polar(1.0, phi));
        normalize_angle(w.arg(), TAU)
    }

    /// `g . 0 = c / conj(a)`.
    pub fn origin_image(&self) -> DiskPoint {
        // |c| < |a| on the group, so the image is always inside the disk
        let z = self.c / self.a.conj();
        DiskPoint { xi: z.re, eta: z.im }
    }

    /// Cartan factors. Elements of `K` (`c = 0` up to `EPS_ALG`) return
    /// `(theta_total, 0, 0)`.
    pub fn cartan_decompose(&self) -> CartanFactors {
        let alpha = self.a.arg();
        if self.c.norm() <= EPS_ALG {
            return CartanFactors { theta: normalize_angle(2.0 * alpha, 2.0 * TAU), r: 0.0, phi: 0.0 };
        }
        let gamma = self.c.arg();
        let phi = normalize_angle(alpha - gamma, TAU);
        let theta = normalize_angle(2.0 * alpha - phi, 2.0 * TAU);
        CartanFactors { theta, r: 2.0 * self.c.norm().asinh(), phi }
    }

    /// Random element `k_theta a_r k_phi` with `r` uniform in `[0, r_max]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> Self {
        let theta = rng.gen_range(0.0..2.0 * TAU);
        let phi = rng.gen_range(0.0..TAU);
        let r = rng.gen_range(0.0..=r_max);
        Self::from_cartan(CartanFactors { theta, r, phi })
    }

    /// Largest entrywise difference between the matrices of two elements.
    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        (self.a - other.a).norm().max((self.c - other.c).norm())
    }
}

impl Mul for SU11Element {
    type Output = SU11Element;

    /// Matrix product; the constraint is preserved exactly in exact arithmetic.
    fn mul(self, rhs: Self) -> Self {
        Self { a: self.a * rhs.a + self.c * rhs.c.conj(), c: self.a * rhs.c + self.c * rhs.a.conj() }
    }
}
