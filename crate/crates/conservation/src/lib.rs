//! Cosymmetries, conserved currents and conservation-law characteristics.

use std::fmt;

use expr_kernel::{Atom, DiffFunction, Q};
use jet_calculus::{
    euler_full, euler_operator, euler_x_layers, full_dt, full_dx, prolong, system_lhs, to_modified, total_dt, total_dx, velocity,
    JetContext, JetError, Report,
};
use model::ModelError;
use rayon::prelude::*;
use symmetry::{EvolutionaryField, SymmetryError};

mod families;
mod physical;

pub use families::{
    make_cosymmetry_family1, make_cosymmetry_family2, make_cosymmetry_family3, make_characteristic_family1,
    make_characteristic_family2, make_characteristic_family3, make_current_family1, make_current_family2,
    make_current_family3, e_prime, QOperator, FAMILY3_PAIRING,
};
pub use physical::{
    generating_currents, invariant_currents, physical_laws, InvariantCurrent, NamedCurrent, PhysicalLaw,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConservationError {
    #[error("constructed object failed verification: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

pub fn ctx() -> JetContext {
    JetContext::modified()
}

/// A triple `(λ¹, λ², λ³)`, used both for cosymmetries and for
/// conservation-law characteristics.
#[derive(Clone, Debug, PartialEq)]
pub struct Cosymmetry {
    pub lambda: [DiffFunction; 3],
}

impl Cosymmetry {
    pub fn new(lambda: [DiffFunction; 3]) -> Result<Cosymmetry, ConservationError> {
        Ok(Cosymmetry {
            lambda: [to_modified(&lambda[0])?, to_modified(&lambda[1])?, to_modified(&lambda[2])?],
        })
    }

    pub fn scale(&self, c: Q) -> Cosymmetry {
        Cosymmetry {
            lambda: self.lambda.clone().map(|e| e.scale(c)),
        }
    }

    pub fn sub(&self, other: &Cosymmetry) -> Cosymmetry {
        Cosymmetry {
            lambda: std::array::from_fn(|i| &self.lambda[i] - &other.lambda[i]),
        }
    }

    pub fn same(&self, other: &Cosymmetry) -> Result<bool, ConservationError> {
        Ok(Report::from_residuals(self.sub(other).lambda.to_vec())?.pass)
    }
}

impl fmt::Display for Cosymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.lambda[0], self.lambda[1], self.lambda[2])
    }
}

/// Density and flux of a conservation law.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedCurrent {
    pub rho: DiffFunction,
    pub sigma: DiffFunction,
}

impl ConservedCurrent {
    pub fn new(rho: DiffFunction, sigma: DiffFunction) -> Result<ConservedCurrent, ConservationError> {
        Ok(ConservedCurrent {
            rho: to_modified(&rho)?,
            sigma: to_modified(&sigma)?,
        })
    }

    pub fn zero() -> ConservedCurrent {
        ConservedCurrent {
            rho: DiffFunction::zero(),
            sigma: DiffFunction::zero(),
        }
    }

    pub fn scale(&self, c: Q) -> ConservedCurrent {
        ConservedCurrent {
            rho: self.rho.scale(c),
            sigma: self.sigma.scale(c),
        }
    }

    /// Componentwise equality modulo coordinate identities.
    pub fn same(&self, other: &ConservedCurrent) -> Result<bool, ConservationError> {
        Ok(Report::from_residuals(vec![&self.rho - &other.rho, &self.sigma - &other.sigma])?.pass)
    }

    /// The reduced characteristic, i.e. the variational derivative of the density.
    pub fn characteristic(&self) -> Result<Cosymmetry, ConservationError> {
        Cosymmetry::new(euler_operator(&self.rho)?)
    }

    /// Whether two currents define the same conservation law, decided by
    /// comparing their reduced characteristics.
    pub fn equivalent(&self, other: &ConservedCurrent) -> Result<bool, ConservationError> {
        self.characteristic()?.same(&other.characteristic()?)
    }
}

impl fmt::Display for ConservedCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rho, self.sigma)
    }
}

/// Residuals `−𝒟ₜλⁱ − 𝒟ₓ(Vⁱλⁱ) + [i ≤ 2](r¹ₓλ¹ + r²ₓλ² + r³ₓλ³)`.
pub fn is_cosymmetry(l: &Cosymmetry) -> Result<Report, ConservationError> {
    let c = ctx();
    let mut coupling = DiffFunction::zero();
    for i in 0..3u8 {
        coupling += DiffFunction::r(i + 1, 1) * &l.lambda[i as usize];
    }
    let mut res = Vec::with_capacity(3);
    for i in 0..3u8 {
        let li = &l.lambda[i as usize];
        let mut r = -total_dt(li, &c)? - total_dx(&(velocity(i + 1) * li), &c);
        if i < 2 {
            r += &coupling;
        }
        res.push(r);
    }
    Ok(Report::from_residuals(res)?)
}

/// Checks `𝒟ₜρ + 𝒟ₓσ = 0` on solutions.
pub fn is_conserved_current(cur: &ConservedCurrent) -> Result<Report, ConservationError> {
    let c = ctx();
    Ok(Report::from_residuals(vec![total_dt(&cur.rho, &c)? + total_dx(&cur.sigma, &c)])?)
}

fn off_shell_defect(cur: &ConservedCurrent, l: &Cosymmetry) -> Result<DiffFunction, ConservationError> {
    let mut div = full_dt(&cur.rho)? + full_dx(&cur.sigma);
    for i in 0..3u8 {
        div -= &l.lambda[i as usize] * &system_lhs(i + 1);
    }
    Ok(div)
}

/// Checks that `D_tρ + D_xσ − Σλⁱℰⁱ` is an `x`-divergence off solutions.
///
/// The residuals are the `x`-Euler operators with respect to `rⁱ` and to
/// `rⁱ_t`; the latter reduce to `E(ρ) − λ`, so a characteristic is matched to
/// its own current. The space-time Euler operator alone only tests that `λ`
/// is some characteristic (see [`is_characteristic`]).
pub fn verify_characteristic_identity(
    cur: &ConservedCurrent,
    l: &Cosymmetry,
) -> Result<Report, ConservationError> {
    let layers = euler_x_layers(&off_shell_defect(cur, l)?, 3)?;
    Ok(Report::from_residuals(layers.into_iter().flatten().collect())?)
}

/// Checks that `Σλⁱℰⁱ` is a space-time divergence, i.e. that `λ` is the
/// characteristic of some conservation law.
pub fn is_characteristic(l: &Cosymmetry) -> Result<Report, ConservationError> {
    let mut e = DiffFunction::zero();
    for i in 0..3u8 {
        e += &l.lambda[i as usize] * &system_lhs(i + 1);
    }
    Ok(Report::from_residuals(euler_full(&e, 3)?)?)
}

/// The current transformed by the prolonged evolutionary field.
pub fn act_symmetry_on_current(
    eta: &EvolutionaryField,
    cur: &ConservedCurrent,
) -> Result<ConservedCurrent, ConservationError> {
    let c = ctx();
    ConservedCurrent::new(prolong(&eta.eta, &cur.rho, &c), prolong(&eta.eta, &cur.sigma, &c))
}

fn explicit_tx(e: &DiffFunction) -> bool {
    e.base_atoms().iter().any(|a| matches!(a, Atom::T | Atom::X))
}

/// Whether the characteristic is free of explicit `t` and `x`.
pub fn is_tx_invariant(l: &Cosymmetry) -> bool {
    !l.lambda.iter().any(explicit_tx)
}

/// [`is_tx_invariant`] applied to the reduced characteristic of a current.
pub fn current_is_tx_invariant(cur: &ConservedCurrent) -> Result<bool, ConservationError> {
    Ok(is_tx_invariant(&cur.characteristic()?))
}

/// Highest jet order among `rⁱ_κ` and `ω^κ`; 0 for jet-free expressions.
pub fn order_of(l: &Cosymmetry) -> u32 {
    l.lambda
        .iter()
        .flat_map(|e| e.base_atoms())
        .filter_map(|a| match a {
            Atom::R(_, k) => Some(k),
            a => a.omega_index(),
        })
        .max()
        .unwrap_or(0)
}

/// Checks many currents in parallel.
pub fn check_currents(currents: &[ConservedCurrent]) -> Vec<Result<Report, ConservationError>> {
    currents.par_iter().map(is_conserved_current).collect()
}

/// Checks many cosymmetries in parallel.
pub fn check_cosymmetries(list: &[Cosymmetry]) -> Vec<Result<Report, ConservationError>> {
    list.par_iter().map(is_cosymmetry).collect()
}
