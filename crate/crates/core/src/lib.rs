//! Geometrical optics of the graded-index medium `n = 1/y`, which is the
//! hyperbolic plane in disguise.
//!
//! Rays are hyperbolic geodesics, wavefronts of the plane-wave solutions are
//! horocycles, and the same metric lives on the pseudosphere. The crate
//! provides the exact geometry of the Poincaré half-plane and disk, the
//! special functions built from horocyclic waves, numerical ray tracing with
//! independent cross-checks, and the pseudospherical surface.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beltrami;
pub mod error;
pub mod grid;
pub mod hypmodels;
pub mod rays;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use grid::Grid;
