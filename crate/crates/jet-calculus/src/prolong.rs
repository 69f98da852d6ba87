//! Prolongation of evolutionary vector fields.

use std::collections::BTreeMap;

use expr_kernel::{derive, Atom, DiffFunction};

use crate::total::{full_dt, full_dx, op_a, total_dx};
use crate::JetContext;

/// `pr η (e)` for the evolutionary field with characteristic `η`.
///
/// Images: `rⁱ_κ ↦ 𝒟ₓ^κ ηⁱ`, mixed jets ↦ full derivatives of `ηⁱ`, and
/// `ω^{κ+1} ↦ (η²−η¹)ω^{κ+1} + 𝒜(pr η ω^κ)` with `ω⁰ ↦ η³`.
pub fn prolong(eta: &[DiffFunction; 3], e: &DiffFunction, ctx: &JetContext) -> DiffFunction {
    let mut xjets: BTreeMap<u8, Vec<DiffFunction>> = BTreeMap::new();
    let mut omegas: Vec<DiffFunction> = vec![eta[2].clone()];
    let diff21 = &eta[1] - &eta[0];
    derive(e, &mut |a: &Atom| match a {
        Atom::R(3, 0) => Some(eta[2].clone()),
        Atom::R(i, k) => {
            let seq = xjets.entry(*i).or_insert_with(|| vec![eta[(*i - 1) as usize].clone()]);
            while seq.len() <= *k as usize {
                let next = total_dx(seq.last().unwrap(), ctx);
                seq.push(next);
            }
            Some(seq[*k as usize].clone())
        }
        Atom::Omega(k) => {
            while omegas.len() <= *k as usize {
                let j = omegas.len() as u32;
                let next = &diff21 * &DiffFunction::omega(j) + op_a(omegas.last().unwrap(), ctx);
                omegas.push(next);
            }
            Some(omegas[*k as usize].clone())
        }
        Atom::Mixed(i, ta, xb) => {
            let mut v = eta[(*i - 1) as usize].clone();
            for _ in 0..*xb {
                v = full_dx(&v);
            }
            for _ in 0..*ta {
                v = full_dt(&v).ok()?;
            }
            Some(v)
        }
        _ => None,
    })
}
