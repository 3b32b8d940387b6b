//! Rays of the medium `n = 1/y`: Hamiltonian tracing, the variational
//! formulation, horocycle flow and the amplitude transport law.

mod checks;
mod horoflow;
mod integrate;
mod variational;

pub use checks::{
    eikonal_residual, el_residual, el_residual_fd, is_physical_ray, transport_amplitude, transport_flux,
    transport_residual, weierstrass_check, Model, NonPhysicalReason, PhysicalVerdict, Sign,
};
pub use horoflow::{
    bundle_flux_report, common_normal, fan_from, horocycle_flow, inward_normal, normal_frame, RayBundleReport,
    UnitTangent,
};
pub use integrate::{trace_bundle, trace_geodesic, trace_geodesic_sampled, RaySample, RayState, Trace, TraceOptions};
pub use variational::{jacobi_length, minimize_jacobi, segment_length, JacobiMinimum, JacobiOptions, PolyPath};
