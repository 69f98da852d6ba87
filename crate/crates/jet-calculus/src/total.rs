//! Restricted and full total derivatives, `𝒜`, `ℬ` and coordinate changes.

use std::collections::BTreeMap;

use expr_kernel::{derive, q, Atom, DiffFunction};

use crate::{JetContext, JetError, Mode};

/// Characteristic velocity `Vⁱ`: `r¹+r²+1`, `r¹+r²−1`, `r¹+r²`.
pub fn velocity(i: u8) -> DiffFunction {
    let shift = match i {
        1 => 1,
        2 => -1,
        3 => 0,
        _ => panic!("component {i} out of range"),
    };
    DiffFunction::r(1, 0) + DiffFunction::r(2, 0) + DiffFunction::int(shift)
}

/// Off-shell left-hand sides `ℰⁱ = rⁱ_t + Vⁱ rⁱ_x`.
pub fn system_lhs(i: u8) -> DiffFunction {
    DiffFunction::mixed(i, 1, 0) + velocity(i) * DiffFunction::r(i, 1)
}

pub(crate) fn e12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 1), q(-1, 1))
}

pub(crate) fn e21() -> DiffFunction {
    DiffFunction::exp_r(q(-1, 1), q(1, 1))
}

fn sum12() -> DiffFunction {
    DiffFunction::r(1, 0) + DiffFunction::r(2, 0)
}

fn dx_image(a: &Atom, ctx: &JetContext) -> Option<DiffFunction> {
    match a {
        Atom::X => Some(DiffFunction::one()),
        Atom::R(3, 0) if ctx.mode == Mode::Modified => Some(e12() * DiffFunction::omega(1)),
        Atom::R(i, k) => Some(DiffFunction::r(*i, k + 1)),
        Atom::Mixed(i, a, b) => Some(DiffFunction::mixed(*i, *a, b + 1)),
        Atom::Omega(k) => Some(e12() * DiffFunction::omega(k + 1)),
        Atom::Nonlocal(k) => ctx.nonlocal.get(k).map(|r| r.dx.clone()),
        _ => None,
    }
}

/// Restricted `𝒟ₓ`.
pub fn total_dx(e: &DiffFunction, ctx: &JetContext) -> DiffFunction {
    derive(e, &mut |a: &Atom| dx_image(a, ctx))
}

/// `𝒟ₓ^k e`.
pub fn dx_pow(e: &DiffFunction, k: u32, ctx: &JetContext) -> DiffFunction {
    let mut out = e.clone();
    for _ in 0..k {
        out = total_dx(&out, ctx);
    }
    out
}

/// Restricted `𝒟ₜ`, with `rⁱ_t` replaced through the system.
pub fn total_dt(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, JetError> {
    if ctx.mode == Mode::OffShell || e.base_atoms().iter().any(|a| matches!(a, Atom::Mixed(..))) {
        return Err(JetError::OffShellMode);
    }
    let std_ctx = JetContext::standard();
    let mut flux: BTreeMap<u8, Vec<DiffFunction>> = BTreeMap::new();
    let out = derive(e, &mut |a: &Atom| match a {
        Atom::T => Some(DiffFunction::one()),
        Atom::R(3, 0) if ctx.mode == Mode::Modified => {
            Some(-(sum12() * e12() * DiffFunction::omega(1)))
        }
        Atom::R(i, k) => {
            let seq = flux
                .entry(*i)
                .or_insert_with(|| vec![velocity(*i) * DiffFunction::r(*i, 1)]);
            while seq.len() <= *k as usize {
                let next = total_dx(seq.last().unwrap(), &std_ctx);
                seq.push(next);
            }
            Some(-seq[*k as usize].clone())
        }
        Atom::Omega(k) => Some(-(sum12() * e12() * DiffFunction::omega(k + 1))),
        Atom::Nonlocal(k) => ctx.nonlocal.get(k).map(|r| r.dt.clone()),
        _ => None,
    });
    Ok(out)
}

/// `𝒜 = e^{r²−r¹}𝒟ₓ`.
pub fn op_a(e: &DiffFunction, ctx: &JetContext) -> DiffFunction {
    e21() * total_dx(e, ctx)
}

/// `ℬ = 𝒟ₜ + (r¹+r²)𝒟ₓ`.
pub fn op_b(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, JetError> {
    Ok(total_dt(e, ctx)? + sum12() * total_dx(e, ctx))
}

pub(crate) fn full_dx_ctx(e: &DiffFunction, ctx: &JetContext) -> DiffFunction {
    derive(e, &mut |a: &Atom| match a {
        Atom::R(3, 0) => Some(DiffFunction::r(3, 1)),
        _ => dx_image(a, ctx),
    })
}

pub(crate) fn full_dt_ctx(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, JetError> {
    let mut err = None;
    let out = derive(e, &mut |a: &Atom| match a {
        Atom::T => Some(DiffFunction::one()),
        Atom::R(i, k) => Some(DiffFunction::mixed(*i, 1, *k)),
        Atom::Mixed(i, a, b) => Some(DiffFunction::mixed(*i, a + 1, *b)),
        Atom::Omega(k) => match to_standard(&DiffFunction::omega(*k)) {
            Ok(s) => full_dt_ctx(&s, ctx).map_err(|e| err = Some(e)).ok(),
            Err(e) => {
                err = Some(e);
                None
            }
        },
        Atom::Nonlocal(k) => ctx.nonlocal.get(k).map(|r| r.dt.clone()),
        _ => None,
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Full `D_x` on mixed jets.
pub fn full_dx(e: &DiffFunction) -> DiffFunction {
    full_dx_ctx(e, &JetContext::off_shell())
}

/// Full `D_t` on mixed jets; no equation is substituted.
pub fn full_dt(e: &DiffFunction) -> Result<DiffFunction, JetError> {
    full_dt_ctx(e, &JetContext::off_shell())
}

/// Rewrites every `ω^κ` (κ ≥ 1) as `𝒜^κ r³` in standard coordinates.
pub fn to_standard(e: &DiffFunction) -> Result<DiffFunction, JetError> {
    let ctx = JetContext::standard();
    let mut seq = vec![DiffFunction::r(3, 0)];
    Ok(e.substitute(&mut |a: &Atom| match a {
        Atom::Omega(k) => {
            while seq.len() <= *k as usize {
                let next = op_a(seq.last().unwrap(), &ctx);
                seq.push(next);
            }
            Some(seq[*k as usize].clone())
        }
        _ => None,
    })?)
}

/// Rewrites every `r³_κ` (κ ≥ 1) as `𝒟ₓ^κ ω⁰` in modified coordinates.
pub fn to_modified(e: &DiffFunction) -> Result<DiffFunction, JetError> {
    let ctx = JetContext::modified();
    let mut seq = vec![DiffFunction::r(3, 0)];
    Ok(e.substitute(&mut |a: &Atom| match a {
        Atom::R(3, k) if *k > 0 => {
            while seq.len() <= *k as usize {
                let next = total_dx(seq.last().unwrap(), &ctx);
                seq.push(next);
            }
            Some(seq[*k as usize].clone())
        }
        _ => None,
    })?)
}

/// Restricts an off-shell expression to solutions: `rⁱ_(a,b) ↦ 𝒟ₜ^a 𝒟ₓ^b rⁱ`.
pub fn on_shell(e: &DiffFunction) -> Result<DiffFunction, JetError> {
    let ctx = JetContext::standard();
    let mut err = None;
    let out = e.substitute(&mut |a: &Atom| match a {
        Atom::Mixed(i, ta, xb) => {
            let mut v = DiffFunction::r(*i, *xb);
            for _ in 0..*ta {
                match total_dt(&v, &ctx) {
                    Ok(n) => v = n,
                    Err(e) => {
                        err = Some(e);
                        return None;
                    }
                }
            }
            Some(v)
        }
        _ => None,
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
