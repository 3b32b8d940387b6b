//! The one-soliton meridian angle and the two forms of the sine-Gordon
//! equation it satisfies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// `phi(p) = 2 atan(e^{-p})`.
pub fn soliton(p: f64) -> f64 {
    2.0 * (-p).exp().atan()
}

/// `dphi/dp = -sin(phi) = -sech p`.
pub fn soliton_derivative(p: f64) -> f64 {
    -1.0 / p.cosh()
}

/// Direction of travel along the funnel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Focusing {
    /// Towards the vertex, `phi` growing from `pi/2` to `pi`.
    Focusing,
    /// Back towards the rim.
    Defocusing,
    Stationary,
}

/// Soliton angle sampled along the lower funnel `p <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonField {
    pub p: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SolitonField {
    pub fn sample(p: &[f64]) -> Result<Self> {
        if let Some(bad) = p.iter().find(|p| !(**p <= 0.0)) {
            return Err(Error::Domain(format!("soliton field lives on p <= 0, got {bad}")));
        }
        Ok(Self { p: p.to_vec(), phi: p.iter().map(|&p| soliton(p)).collect() })
    }

    /// Classifies the move from `p0` to `p1`.
    pub fn regime(p0: f64, p1: f64) -> Focusing {
        match soliton(p1).partial_cmp(&soliton(p0)) {
            Some(std::cmp::Ordering::Greater) => Focusing::Focusing,
            Some(std::cmp::Ordering::Less) => Focusing::Defocusing,
            _ => Focusing::Stationary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SineGordonForm {
    /// `phi_pp - phi_qq - sin(phi) cos(phi)` on a `(p, q)` grid of `phi`.
    Pq,
    /// `omega_{alpha beta} - sin(omega)` on an `(alpha, beta)` grid of `omega`.
    AlphaBeta,
}

/// Central-difference sine-Gordon residual; edge nodes are masked.
pub fn sine_gordon_residual(field: &Grid<f64>, form: SineGordonForm) -> Grid<Option<f64>> {
    let h2 = field.h * field.h;
    match form {
        SineGordonForm::Pq => field.stencil(|_, _, n| {
            let f = *n(0, 0);
            let fpp = (n(1, 0) - 2.0 * f + n(-1, 0)) / h2;
            let fqq = (n(0, 1) - 2.0 * f + n(0, -1)) / h2;
            fpp - fqq - f.sin() * f.cos()
        }),
        SineGordonForm::AlphaBeta => field.stencil(|_, _, n| {
            let fab = (n(1, 1) - n(1, -1) - n(-1, 1) + n(-1, -1)) / (4.0 * h2);
            fab - n(0, 0).sin()
        }),
    }
}
