//! Random expression trees for property testing.

use std::sync::Arc;

use rand::Rng;

use crate::atom::{Atom, ClosedForm, FunctionSymbol};
use crate::tree::Expr;
use crate::Q;

/// Generator over a fixed pool of atoms and symbols.
pub struct ExprGen {
    atoms: Vec<Atom>,
    phi: Arc<FunctionSymbol>,
    omega: Arc<FunctionSymbol>,
}

impl Default for ExprGen {
    fn default() -> Self {
        ExprGen {
            atoms: vec![
                Atom::T,
                Atom::X,
                Atom::R(1, 0),
                Atom::R(2, 0),
                Atom::R(1, 1),
                Atom::R(2, 1),
                Atom::R(1, 2),
                Atom::R(3, 0),
                Atom::Omega(1),
                Atom::Omega(2),
            ],
            phi: FunctionSymbol::klein_gordon("Phi", Q::new(-1, 4)),
            omega: FunctionSymbol::free("Omega", 2),
        }
    }
}

impl ExprGen {
    /// Generator drawing plain atoms from `atoms`.
    pub fn with_atoms(atoms: Vec<Atom>) -> ExprGen {
        ExprGen {
            atoms,
            ..ExprGen::default()
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Expr {
        match rng.gen_range(0..10) {
            0 | 1 => {
                let n = rng.gen_range(-4i128..=4);
                let d = rng.gen_range(1i128..=3);
                Expr::Num(Q::new(n, d))
            }
            2 => Expr::Apply {
                symbol: self.phi.clone(),
                index: vec![rng.gen_range(0..3), rng.gen_range(0..3)],
                args: vec![Expr::Atom(Atom::R(1, 0)), Expr::Atom(Atom::R(2, 0))],
            },
            3 => Expr::Apply {
                symbol: self.omega.clone(),
                index: vec![rng.gen_range(0..2), rng.gen_range(0..2)],
                args: vec![Expr::Atom(Atom::R(3, 0)), Expr::Atom(Atom::Omega(1))],
            },
            _ => Expr::Atom(self.atoms[rng.gen_range(0..self.atoms.len())].clone()),
        }
    }

    fn linear<R: Rng>(&self, rng: &mut R) -> Expr {
        let k = rng.gen_range(1..=2);
        let pool = [Atom::R(1, 0), Atom::R(2, 0), Atom::X];
        Expr::Sum(
            (0..k)
                .map(|_| {
                    let c = Q::new(rng.gen_range(-2i128..=2), rng.gen_range(1i128..=2));
                    Expr::Product(vec![Expr::Num(c), Expr::Atom(pool[rng.gen_range(0..3)].clone())])
                })
                .collect(),
        )
    }

    /// A random tree of depth at most `depth`.
    pub fn tree<R: Rng>(&self, rng: &mut R, depth: u32) -> Expr {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.leaf(rng);
        }
        match rng.gen_range(0..12) {
            0..=3 => Expr::Sum((0..rng.gen_range(2..=3)).map(|_| self.tree(rng, depth - 1)).collect()),
            4..=6 => Expr::Product((0..2).map(|_| self.tree(rng, depth - 1)).collect()),
            7 => {
                let n = if rng.gen_bool(0.5) { -1 } else { 2 };
                Expr::Pow(Box::new(self.tree(rng, depth.min(2) - 1)), n)
            }
            8 => Expr::Pow(Box::new(self.leaf(rng)), rng.gen_range(-3..=3)),
            9 => Expr::Product(vec![Expr::Exp(Box::new(self.linear(rng))), self.tree(rng, depth - 1)]),
            10 => Expr::Closed(ClosedForm::Tanh, Box::new(self.tree(rng, depth.min(2) - 1))),
            _ => self.leaf(rng),
        }
    }
}
