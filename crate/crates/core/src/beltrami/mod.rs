//! The Beltrami pseudosphere: a surface of constant curvature `-1` on which
//! horoballs of the hyperbolic plane wind isometrically, and whose meridian
//! angle is the one-soliton of the sine-Gordon equation.

mod soliton;
mod surface;
mod winding;

pub use soliton::{sine_gordon_residual, soliton, soliton_derivative, Focusing, SineGordonForm, SolitonField};
pub use surface::{
    brioschi_curvature, chart_change, embed, embed_alpha_beta, embed_phi_v, embed_pq, embed_uv, embed_uv_with,
    fundamental_form, funnel_mesh, gaussian_curvature, metric_pullback, parallel_radius, phi_to_p, phi_to_u,
    revolution_curvature, tangent_length, tractrix, u_to_phi, BeltramiChart, ChartId, Form, FunnelMesh, PQChart,
    PseudospherePoint, RHO,
};
pub use winding::{bounding_horocycle, wind_horocycle, wind_horocycle_in, WoundPoint};
