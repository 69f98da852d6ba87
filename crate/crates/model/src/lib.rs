//! The isothermal no-slip drift flux system in Riemann invariants.

pub mod maps;
pub mod system;
pub mod tilde;

pub use maps::{
    hodograph_derivatives,
    physical_fields, physical_from_riemann, riemann_from_physical, transform_t, transform_t_inverse,
    PhysicalFields,
};
pub use system::{characteristic_velocities, semi_hamiltonian_check, HydroSystem};
pub use tilde::{q_tilde, tilde_dy, tilde_dz, tilde_j, TildeOp, TildeWord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("point outside the physical domain: {0}")]
    Domain(String),
    #[error("degenerate jet: {0}")]
    DegenerateJet(String),
    #[error(transparent)]
    Jet(#[from] jet_calculus::JetError),
}
