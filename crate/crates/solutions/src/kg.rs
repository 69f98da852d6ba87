//! Exponential solutions of `Ψ_{r¹r²} = −Ψ/4`.

use std::collections::BTreeMap;

use expr_kernel::{diff_partial, q, Atom, DiffFunction, Q};
use num_traits::{ToPrimitive, Zero};

use crate::SolutionError;

/// `c·e^{a r¹ + b r²}` with `ab = −1/4`.
#[derive(Clone, Debug, PartialEq)]
pub struct KGTerm {
    pub coef: Q,
    pub a: Q,
    pub b: Q,
}

#[derive(Clone, Debug, PartialEq)]
struct NumTerm {
    c: f64,
    a: f64,
    b: f64,
}

/// `Σ cₖe^{aₖr¹+bₖr²} + d·(r¹+r²)e^{(r¹−r²)/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KGSolution {
    terms: Vec<KGTerm>,
    degenerate: Q,
    num: Vec<NumTerm>,
}

impl KGSolution {
    pub fn new(terms: Vec<KGTerm>) -> Result<KGSolution, SolutionError> {
        for t in &terms {
            if t.a * t.b != q(-1, 4) {
                return Err(SolutionError::NotKleinGordon(format!("a = {}, b = {}", t.a, t.b)));
            }
        }
        let num = terms
            .iter()
            .map(|t| NumTerm {
                c: t.coef.to_f64().unwrap(),
                a: t.a.to_f64().unwrap(),
                b: t.b.to_f64().unwrap(),
            })
            .collect();
        Ok(KGSolution {
            terms,
            degenerate: Q::zero(),
            num,
        })
    }

    /// The single exponential `e^{a r¹ + b r²}`.
    pub fn exp(a: Q, b: Q) -> Result<KGSolution, SolutionError> {
        KGSolution::new(vec![KGTerm { coef: q(1, 1), a, b }])
    }

    /// Adds `d·(r¹+r²)e^{(r¹−r²)/2}`.
    pub fn with_degenerate(mut self, d: Q) -> KGSolution {
        self.degenerate += d;
        self
    }

    pub fn terms(&self) -> &[KGTerm] {
        &self.terms
    }

    pub fn to_expr(&self) -> DiffFunction {
        let mut e = DiffFunction::zero();
        for t in &self.terms {
            e += DiffFunction::exp_r(t.a, t.b).scale(t.coef);
        }
        let s = DiffFunction::r(1, 0) + DiffFunction::r(2, 0);
        e + (s * DiffFunction::exp_r(q(1, 2), q(-1, 2))).scale(self.degenerate)
    }

    /// Symbolic check of `Ψ_{r¹r²} + Ψ/4 = 0`.
    pub fn satisfies_klein_gordon(&self) -> bool {
        let psi = self.to_expr();
        let mixed = diff_partial(&diff_partial(&psi, &Atom::r(1, 0)), &Atom::r(2, 0));
        (mixed + psi.scale(q(1, 4))).is_zero()
    }

    /// `Ψ` has a component outside
    /// `⟨e^{(r²−r¹)/2}, e^{(r¹−r²)/2}, (r¹+r²)e^{(r¹−r²)/2}⟩`.
    pub fn is_nondegenerate(&self) -> bool {
        let mut by_exp: BTreeMap<(Q, Q), Q> = BTreeMap::new();
        for t in &self.terms {
            *by_exp.entry((t.a, t.b)).or_insert_with(Q::zero) += t.coef;
        }
        let excluded = [(q(-1, 2), q(1, 2)), (q(1, 2), q(-1, 2))];
        by_exp
            .into_iter()
            .any(|(k, c)| !c.is_zero() && !excluded.contains(&k))
    }

    /// `∂^m_{r¹}∂^n_{r²}Ψ`.
    pub fn eval(&self, r1: f64, r2: f64, m: u32, n: u32) -> f64 {
        let mut v = 0.0;
        for t in &self.num {
            v += t.c * t.a.powi(m as i32) * t.b.powi(n as i32) * (t.a * r1 + t.b * r2).exp();
        }
        if !self.degenerate.is_zero() {
            let d = self.degenerate.to_f64().unwrap();
            let e = |m: i32, n: i32| 0.5f64.powi(m) * (-0.5f64).powi(n) * (0.5 * (r1 - r2)).exp();
            let (mi, ni) = (m as i32, n as i32);
            let mut g = (r1 + r2) * e(mi, ni);
            if m > 0 {
                g += mi as f64 * e(mi - 1, ni);
            }
            if n > 0 {
                g += ni as f64 * e(mi, ni - 1);
            }
            v += d * g;
        }
        v
    }
}
