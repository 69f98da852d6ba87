//! Unnormalized expression trees, their normalization and direct evaluation.

use std::sync::Arc;

use num_traits::{One, ToPrimitive};

use crate::atom::{Atom, ClosedForm, FunctionSymbol};
use crate::eval::{Instantiation, Point, DENOMINATOR_FLOOR};
use crate::function::{closed, DiffFunction, Monomial};
use crate::{KernelError, Q};

/// A syntax tree as produced by the parser or by random generation.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Q),
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Closed(ClosedForm, Box<Expr>),
    Apply {
        symbol: Arc<FunctionSymbol>,
        index: Vec<u32>,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Q::from_integer(n as i128))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::Atom(a)
    }
}

/// Normal form of a tree.
pub fn normalize(e: &Expr) -> Result<DiffFunction, KernelError> {
    Ok(match e {
        Expr::Num(c) => DiffFunction::constant(*c),
        Expr::Atom(a) => {
            if a.is_fn() {
                return Err(KernelError::UnsupportedForm(
                    "function atoms must be written as applications".to_string(),
                ));
            }
            DiffFunction::atom(a.clone())
        }
        Expr::Sum(parts) => {
            let mut acc = DiffFunction::zero();
            for p in parts {
                acc += normalize(p)?;
            }
            acc
        }
        Expr::Product(parts) => {
            let mut acc = DiffFunction::one();
            for p in parts {
                acc = &acc * &normalize(p)?;
            }
            acc
        }
        Expr::Pow(base, n) => {
            let b = normalize(base)?;
            if *n < 0 && b.is_zero() {
                return Err(KernelError::UnsupportedForm("negative power of zero".to_string()));
            }
            b.pow(*n)
        }
        Expr::Exp(arg) => {
            let a = normalize(arg)?;
            let mut form = Vec::new();
            for (m, c) in a.terms() {
                match m.factors() {
                    [(atom, 1)] if m.exp().is_empty() && !atom.is_fn() => form.push((atom.clone(), *c)),
                    _ => {
                        return Err(KernelError::UnsupportedForm(format!(
                            "exponential of a non-linear form: {a}"
                        )))
                    }
                }
            }
            DiffFunction::term(Q::one(), Monomial::exponential(&form))
        }
        Expr::Closed(form, arg) => {
            let a = normalize(arg)?;
            if *form == ClosedForm::Recip && a.is_zero() {
                return Err(KernelError::UnsupportedForm("reciprocal of zero".to_string()));
            }
            closed(*form, &a)
        }
        Expr::Apply { symbol, index, args } => {
            if args.len() != symbol.arity() {
                return Err(KernelError::UnsupportedForm(format!(
                    "{} expects {} arguments",
                    symbol.name(),
                    symbol.arity()
                )));
            }
            let mut nargs = Vec::with_capacity(args.len());
            for a in args {
                nargs.push(normalize(a)?);
            }
            DiffFunction::apply(symbol, index, nargs)
        }
    })
}

/// Converts a normal form back into a tree whose normalization reproduces it.
pub fn to_tree(e: &DiffFunction) -> Expr {
    let mut terms = Vec::new();
    for (m, c) in e.terms() {
        let mut parts = vec![Expr::Num(*c)];
        for (a, p) in m.factors() {
            let base = match a {
                Atom::Fn(f) => match f.symbol().closed_form() {
                    Some(form) => Expr::Closed(form, Box::new(to_tree(&f.args()[0]))),
                    None => Expr::Apply {
                        symbol: f.symbol().clone(),
                        index: f.index().to_vec(),
                        args: f.args().iter().map(to_tree).collect(),
                    },
                },
                _ => Expr::Atom(a.clone()),
            };
            parts.push(if *p == 1 { base } else { Expr::Pow(Box::new(base), *p) });
        }
        if !m.exp().is_empty() {
            let lin = m
                .exp()
                .iter()
                .map(|(a, k)| Expr::Product(vec![Expr::Num(*k), Expr::Atom(a.clone())]))
                .collect();
            parts.push(Expr::Exp(Box::new(Expr::Sum(lin))));
        }
        terms.push(Expr::Product(parts));
    }
    Expr::Sum(terms)
}

/// Evaluates a tree directly, without normalizing.
pub fn eval_tree(e: &Expr, point: &Point, inst: &Instantiation) -> Result<f64, KernelError> {
    Ok(match e {
        Expr::Num(c) => c.to_f64().unwrap(),
        Expr::Atom(a) => *point
            .get(a)
            .ok_or_else(|| KernelError::MissingValue(a.to_string()))?,
        Expr::Sum(parts) => {
            let mut s = 0.0;
            for p in parts {
                s += eval_tree(p, point, inst)?;
            }
            s
        }
        Expr::Product(parts) => {
            let mut s = 1.0;
            for p in parts {
                s *= eval_tree(p, point, inst)?;
            }
            s
        }
        Expr::Pow(base, n) => {
            let b = eval_tree(base, point, inst)?;
            if *n < 0 && b.abs() < DENOMINATOR_FLOOR {
                return Err(KernelError::SingularEvaluation("tree power".to_string()));
            }
            b.powi(*n)
        }
        Expr::Exp(arg) => eval_tree(arg, point, inst)?.exp(),
        Expr::Closed(form, arg) => {
            let a = eval_tree(arg, point, inst)?;
            if *form == ClosedForm::Recip && a.abs() < DENOMINATOR_FLOOR {
                return Err(KernelError::SingularEvaluation("tree reciprocal".to_string()));
            }
            form.eval(a)
        }
        Expr::Apply { symbol, index, args } => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_tree(a, point, inst)?);
            }
            let idx: Vec<u32> = if index.is_empty() { vec![0; args.len()] } else { index.clone() };
            inst.get(symbol.name())
                .ok_or_else(|| KernelError::MissingInstance(symbol.name().to_string()))?
                .eval(&vals, &idx)
        }
    })
}

/// Base atoms used by a tree.
pub fn tree_atoms(e: &Expr, out: &mut std::collections::BTreeSet<Atom>) {
    match e {
        Expr::Num(_) => {}
        Expr::Atom(a) => {
            out.insert(a.clone());
        }
        Expr::Sum(p) | Expr::Product(p) => p.iter().for_each(|x| tree_atoms(x, out)),
        Expr::Pow(b, _) | Expr::Exp(b) | Expr::Closed(_, b) => tree_atoms(b, out),
        Expr::Apply { args, .. } => args.iter().for_each(|x| tree_atoms(x, out)),
    }
}
