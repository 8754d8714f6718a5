//! Ramanujan, rescaled, Darboux-Halphen, Chazy and lifted Hamiltonian
//! systems, a complex-time integrator, and Halphen roots of the Chazy cubic.

pub mod cubic;
pub mod hamiltonian;
pub mod integrator;
pub mod systems;

pub use cubic::{cubic_roots, match_roots, root_curve, root_curve_with_labels, MonicCubic, RootCurve};
pub use hamiltonian::{
    gradient, hamilton_field, hamiltonian_lift, lifted_field_from_f, lifted_flow, poisson_bracket,
};
pub use integrator::{integrate, IntegratorConfig, Sample, Trajectory};
pub use systems::{
    chazy_rhs, halphen_rhs, hamiltonian_f, lifted_rhs, ramanujan_rhs, rescaled_rhs, substitution_s5,
    symmetric_halphen_rhs, State3, State4, System,
};
