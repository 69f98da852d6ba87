//! Euler operators.

use std::collections::BTreeSet;

use expr_kernel::{diff_partial, Atom, DiffFunction};

use crate::total::{full_dt, full_dx, to_modified, to_standard, total_dx};
use crate::{JetContext, JetError};

/// Restricted Euler operator `Eⁱ = Σ_κ (−𝒟ₓ)^κ ∂/∂rⁱ_κ`, i = 1, 2, 3.
///
/// The density may use modified coordinates; the components are returned in
/// modified coordinates.
pub fn euler_operator(density: &DiffFunction) -> Result<[DiffFunction; 3], JetError> {
    let ctx = JetContext::standard();
    let s = to_standard(density)?;
    let atoms = s.base_atoms();
    let mut out: [DiffFunction; 3] = Default::default();
    for i in 1..=3u8 {
        let top = atoms
            .iter()
            .filter_map(|a| match a {
                Atom::R(j, k) if *j == i => Some(*k),
                _ => None,
            })
            .max();
        let Some(top) = top else { continue };
        let mut acc = DiffFunction::zero();
        for k in (0..=top).rev() {
            acc = -total_dx(&acc, &ctx) + diff_partial(&s, &Atom::r(i, k));
        }
        // Horner form: acc = Σ (−𝒟ₓ)^k ∂s/∂rⁱ_k after the loop.
        out[(i - 1) as usize] = to_modified(&acc)?;
    }
    Ok(out)
}

/// Full Euler operator over mixed jets, `Σ (−D_t)^a (−D_x)^b ∂/∂rⁱ_(a,b)`.
pub fn euler_full(density: &DiffFunction, n: u8) -> Result<Vec<DiffFunction>, JetError> {
    let s = to_standard(density)?;
    let atoms: BTreeSet<Atom> = s.base_atoms();
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let mut acc = DiffFunction::zero();
        for a in &atoms {
            let (ta, xb) = match a {
                Atom::R(j, k) if *j == i => (0, *k),
                Atom::Mixed(j, ta, xb) if *j == i => (*ta, *xb),
                _ => continue,
            };
            let mut v = diff_partial(&s, a);
            for _ in 0..xb {
                v = -full_dx(&v);
            }
            for _ in 0..ta {
                v = -full_dt(&v)?;
            }
            acc += v;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Euler operators in `x` alone, treating each `t`-derivative layer
/// `rⁱ_(a,·)` as a separate dependent variable.
///
/// Entry `[a][i−1]` is `Σ_b (−D_x)^b ∂/∂rⁱ_(a,b)`. An expression is a total
/// `x`-divergence exactly when every entry vanishes.
pub fn euler_x_layers(e: &DiffFunction, n: u8) -> Result<Vec<Vec<DiffFunction>>, JetError> {
    let s = to_standard(e)?;
    let atoms: BTreeSet<Atom> = s.base_atoms();
    let layers = atoms
        .iter()
        .filter_map(|a| match a {
            Atom::Mixed(_, ta, _) => Some(*ta),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut out = vec![vec![DiffFunction::zero(); n as usize]; layers as usize + 1];
    for a in &atoms {
        let (i, ta, xb) = match a {
            Atom::R(j, k) => (*j, 0, *k),
            Atom::Mixed(j, ta, xb) => (*j, *ta, *xb),
            _ => continue,
        };
        if i > n {
            continue;
        }
        let mut v = diff_partial(&s, a);
        for _ in 0..xb {
            v = -full_dx(&v);
        }
        out[ta as usize][(i - 1) as usize] += v;
    }
    Ok(out)
}
