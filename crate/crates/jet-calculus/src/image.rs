//! The operator `𝒜̂ = Σ ω^{κ+1}∂_{ω^κ}`, the membership test for its image,
//! and order functions.

use expr_kernel::{derive, diff_partial, Atom, DiffFunction};

use crate::total::to_modified;
use crate::{jet_is_zero, JetError};

/// `𝒜̂` on functions of the modified coordinates `ω^κ`.
pub fn ahat(e: &DiffFunction) -> DiffFunction {
    derive(e, &mut |a: &Atom| a.omega_index().map(|k| DiffFunction::omega(k + 1)))
}

fn top_omega(e: &DiffFunction) -> Option<u32> {
    e.base_atoms().iter().filter_map(Atom::omega_index).max()
}

/// `𝖤Ω = Σ_{κ≥1} Σ_{κ'<κ} ω^{κ−κ'} (−𝒜̂)^{κ'} ∂_{ω^κ}Ω − Ω`.
pub fn e_operator(omega: &DiffFunction) -> DiffFunction {
    let mut out = -omega.clone();
    let Some(top) = top_omega(omega) else { return out };
    for k in 1..=top {
        let mut d = diff_partial(omega, &Atom::omega(k));
        for kp in 0..k {
            if d.is_zero() {
                break;
            }
            out += DiffFunction::omega(k - kp) * &d;
            d = -ahat(&d);
        }
    }
    out
}

/// Whether `Ω` lies in the image of `𝒜̂`, decided by `𝖤Ω = 0`.
pub fn in_image_of_ahat(omega: &DiffFunction) -> Result<bool, JetError> {
    jet_is_zero(&e_operator(omega))
}

/// Jet families for [`ord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    R1,
    R2,
    Omega,
}

/// Highest jet index of `family` occurring in `e`, `None` standing for `−∞`.
pub fn ord(e: &DiffFunction, family: Family) -> Option<u32> {
    let m = to_modified(e).unwrap_or_else(|_| e.clone());
    m.base_atoms()
        .iter()
        .filter_map(|a| match (family, a) {
            (Family::R1, Atom::R(1, k)) | (Family::R2, Atom::R(2, k)) => Some(*k),
            (Family::Omega, a) => a.omega_index(),
            _ => None,
        })
        .max()
}
