//! Derivations: linear maps obeying the Leibniz rule, fixed by their values
//! on base atoms. Partial derivatives, total derivatives and prolonged
//! evolutionary fields are all instances.

use std::collections::BTreeMap;

use crate::atom::{Atom, ClosedForm};
use crate::function::{DiffFunction, Monomial};
use crate::Q;

/// Applies the derivation whose value on each base atom is `image(atom)`.
///
/// `image` returning `None` means the atom is annihilated. Function atoms are
/// handled by the chain rule through their arguments.
pub fn derive<F>(e: &DiffFunction, image: &mut F) -> DiffFunction
where
    F: FnMut(&Atom) -> Option<DiffFunction>,
{
    let mut memo: BTreeMap<Atom, Option<DiffFunction>> = BTreeMap::new();
    derive_memo(e, image, &mut memo)
}

fn derive_memo<F>(
    e: &DiffFunction,
    image: &mut F,
    memo: &mut BTreeMap<Atom, Option<DiffFunction>>,
) -> DiffFunction
where
    F: FnMut(&Atom) -> Option<DiffFunction>,
{
    let mut out = DiffFunction::zero();
    for (m, c) in e.terms() {
        for (a, p) in m.factors() {
            if let Some(da) = atom_derivative(a, image, memo) {
                out.add_product_term(&da, *c * Q::from_integer(*p as i128), &m.shifted(a, -1));
            }
        }
        if !m.exp().is_empty() {
            let mut dl = DiffFunction::zero();
            for (a, k) in m.exp() {
                if let Some(da) = atom_derivative(a, image, memo) {
                    dl.add_scaled(&da, *k);
                }
            }
            out.add_product_term(&dl, *c, m);
        }
    }
    out
}

fn atom_derivative<F>(
    a: &Atom,
    image: &mut F,
    memo: &mut BTreeMap<Atom, Option<DiffFunction>>,
) -> Option<DiffFunction>
where
    F: FnMut(&Atom) -> Option<DiffFunction>,
{
    if let Some(v) = memo.get(a) {
        return v.clone();
    }
    let v = match a {
        Atom::Fn(f) => {
            let mut acc = DiffFunction::zero();
            for (slot, arg) in f.args().iter().enumerate() {
                let darg = derive_memo(arg, image, memo);
                if darg.is_zero() {
                    continue;
                }
                let partial = match f.symbol().closed_form() {
                    Some(ClosedForm::Recip) => {
                        let fa = DiffFunction::atom(a.clone());
                        -(&fa * &fa)
                    }
                    Some(ClosedForm::Tanh) => {
                        let fa = DiffFunction::atom(a.clone());
                        &DiffFunction::one() - &(&fa * &fa)
                    }
                    None => {
                        let (c, raised) = f.raised(slot);
                        DiffFunction::term(c, Monomial::atom(Atom::Fn(raised), 1))
                    }
                };
                acc += &partial * &darg;
            }
            (!acc.is_zero()).then_some(acc)
        }
        _ => image(a).filter(|d| !d.is_zero()),
    };
    memo.insert(a.clone(), v.clone());
    v
}

/// Partial derivative with respect to a base atom, chain rule through symbols.
pub fn diff_partial(e: &DiffFunction, v: &Atom) -> DiffFunction {
    derive(e, &mut |a: &Atom| (a == v).then(DiffFunction::one))
}

/// Repeated partial derivative.
pub fn diff_n(e: &DiffFunction, v: &Atom, n: u32) -> DiffFunction {
    let mut out = e.clone();
    for _ in 0..n {
        out = diff_partial(&out, v);
    }
    out
}

/// Whether `e` is free of `v` (directly or through function arguments).
pub fn is_free_of(e: &DiffFunction, v: &Atom) -> bool {
    !e.depends_on(v)
}

/// Coefficients of `e` as a polynomial in the given atoms (exponents ≥ 0),
/// keyed by the monomial in those atoms.
pub fn coefficients_in(e: &DiffFunction, vars: &[Atom]) -> BTreeMap<Monomial, DiffFunction> {
    e.collect_by(|m| {
        let mut key = Monomial::one();
        let mut rest = m.clone();
        for v in vars {
            let p = m.power_of(v);
            if p != 0 {
                key = key.mul(&Monomial::atom(v.clone(), p));
                rest = rest.shifted(v, -p);
            }
        }
        (key, rest)
    })
}
