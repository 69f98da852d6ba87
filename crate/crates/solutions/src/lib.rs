//! Exact solutions of the drift flux system: Klein–Gordon seeds, the implicit
//! solution families, Newton sampling on `(t, x)` grids and finite-difference
//! residual checks.

use expr_kernel::KernelError;
use jet_calculus::JetError;

mod family;
mod grid;
mod kg;

pub use family::{make_regular, make_singular, make_ultra, FamilyTag, ImplicitSolution, RegularMaps, Side, Univariate};
pub use grid::{
    conservation_residual, convergence_orders, interior_norms, pde_residual, sample_on_grid, GridField, GridSpec,
    NewtonCertificate, Norms,
};
pub use kg::{KGSolution, KGTerm};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error("Ψ = {0} lies in the degenerate span")]
    DegenerateSeed(String),
    #[error("exponent pair is not a Klein–Gordon mode: {0}")]
    NotKleinGordon(String),
    #[error("not a univariate closed form in s: {0}")]
    NotUnivariate(String),
    #[error("Newton iteration diverged at node {node:?}")]
    NewtonDiverged { node: (usize, usize) },
    #[error("singular Jacobian at node {node:?}")]
    JacobianSingular { node: (usize, usize) },
    #[error("branch jump of {jump} at node {node:?}")]
    BranchJump { node: (usize, usize), jump: f64 },
    #[error("non-finite value at node {node:?}")]
    NonFinite { node: (usize, usize) },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cannot evaluate jet variable {0} on a grid")]
    UnsupportedJet(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Jet(#[from] JetError),
}
