//! The regular, singular and ultra-singular solution families.

use expr_kernel::{closed, diff_partial, eval_numeric, parse, Atom, ClosedForm, DiffFunction, Instantiation, Point, Q};

use crate::kg::KGSolution;
use crate::SolutionError;

/// A univariate closed form in the parameter `s`, with its first three
/// derivatives precomputed.
#[derive(Clone, Debug)]
pub struct Univariate {
    derivs: [DiffFunction; 4],
}

impl Univariate {
    pub fn new(expr: DiffFunction) -> Result<Univariate, SolutionError> {
        if let Some(a) = expr.base_atoms().into_iter().find(|a| *a != Atom::Param(0)) {
            return Err(SolutionError::NotUnivariate(a.to_string()));
        }
        if expr.has_symbols() && !expr.has_closed_symbols() {
            return Err(SolutionError::NotUnivariate(expr.to_string()));
        }
        let s = Atom::Param(0);
        let d1 = diff_partial(&expr, &s);
        let d2 = diff_partial(&d1, &s);
        let d3 = diff_partial(&d2, &s);
        Ok(Univariate {
            derivs: [expr, d1, d2, d3],
        })
    }

    /// An expression in `s` in the text grammar, e.g. `(tanh s)`.
    pub fn parse(src: &str) -> Result<Univariate, SolutionError> {
        Univariate::new(parse(src)?)
    }

    /// `Σ cₖsᵏ`.
    pub fn poly(coeffs: &[Q]) -> Result<Univariate, SolutionError> {
        if coeffs.len() > 4 {
            return Err(SolutionError::NotUnivariate(format!("polynomial of degree {}", coeffs.len() - 1)));
        }
        let s = DiffFunction::atom(Atom::Param(0));
        let mut e = DiffFunction::zero();
        for (k, c) in coeffs.iter().enumerate() {
            e += s.pow(k as i32).scale(*c);
        }
        Univariate::new(e)
    }

    pub fn tanh() -> Univariate {
        Univariate::new(closed(ClosedForm::Tanh, &DiffFunction::atom(Atom::Param(0)))).unwrap()
    }

    pub fn exp() -> Univariate {
        Univariate::new(DiffFunction::exp_linear(&[(Atom::Param(0), Q::from_integer(1))])).unwrap()
    }

    pub fn expr(&self) -> &DiffFunction {
        &self.derivs[0]
    }

    /// The `k`-th derivative at `s`, `k ≤ 3`.
    pub fn eval(&self, s: f64, k: usize) -> Result<f64, SolutionError> {
        let point: Point = [(Atom::Param(0), s)].into_iter().collect();
        Ok(eval_numeric(&self.derivs[k], &point, &Instantiation::new())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `r¹ = c`.
    R1,
    /// `r² = c`.
    R2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    Regular,
    SingularR1,
    SingularR2,
    Ultra,
}

#[derive(Clone, Debug)]
pub enum ImplicitSolution {
    Regular { psi: KGSolution, w: Univariate },
    Singular { side: Side, c: f64, theta: Univariate, w: Univariate },
    Ultra { c1: f64, c2: f64, w: Univariate },
}

/// Values and first partials of `(t, x)` as functions of `(r¹, r²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularMaps {
    pub t: f64,
    pub x: f64,
    /// `[[t₁, t₂], [x₁, x₂]]`.
    pub jacobian: [[f64; 2]; 2],
}

impl RegularMaps {
    pub fn det(&self) -> f64 {
        let j = self.jacobian;
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    /// `(r¹ₓ, r²ₓ) = (−t₂/J, t₁/J)`.
    pub fn r_x(&self) -> [f64; 2] {
        let d = self.det();
        [-self.jacobian[0][1] / d, self.jacobian[0][0] / d]
    }
}

pub fn make_regular(psi: KGSolution, w: Univariate) -> Result<ImplicitSolution, SolutionError> {
    if !psi.is_nondegenerate() {
        return Err(SolutionError::DegenerateSeed(psi.to_expr().to_string()));
    }
    Ok(ImplicitSolution::Regular { psi, w })
}

/// For `Side::R1`, `theta` is `Θ²(r²)`; for `Side::R2` it is `Θ¹(r¹)`.
pub fn make_singular(side: Side, c: f64, theta: Univariate, w: Univariate) -> ImplicitSolution {
    ImplicitSolution::Singular { side, c, theta, w }
}

pub fn make_ultra(c1: f64, c2: f64, w: Univariate) -> ImplicitSolution {
    ImplicitSolution::Ultra { c1, c2, w }
}

impl ImplicitSolution {
    pub fn tag(&self) -> FamilyTag {
        match self {
            ImplicitSolution::Regular { .. } => FamilyTag::Regular,
            ImplicitSolution::Singular { side: Side::R1, .. } => FamilyTag::SingularR1,
            ImplicitSolution::Singular { side: Side::R2, .. } => FamilyTag::SingularR2,
            ImplicitSolution::Ultra { .. } => FamilyTag::Ultra,
        }
    }

    /// `t = −e^{(r²−r¹)/2}(Ψ₁+Ψ₂)`,
    /// `x = e^{(r²−r¹)/2}(2Ψ₁ + Ψ − (r¹+r²+1)(Ψ₁+Ψ₂))`.
    pub fn regular_maps(&self, r1: f64, r2: f64) -> Option<RegularMaps> {
        let ImplicitSolution::Regular { psi, .. } = self else {
            return None;
        };
        let p = |m, n| psi.eval(r1, r2, m, n);
        let e = (0.5 * (r2 - r1)).exp();
        let (e1, e2) = (-0.5 * e, 0.5 * e);
        let a = p(1, 0) + p(0, 1);
        let a1 = p(2, 0) + p(1, 1);
        let a2 = p(1, 1) + p(0, 2);
        let v = r1 + r2 + 1.0;
        let b = 2.0 * p(1, 0) + p(0, 0) - v * a;
        let b1 = 2.0 * p(2, 0) + p(1, 0) - a - v * a1;
        let b2 = 2.0 * p(1, 1) + p(0, 1) - a - v * a2;
        Some(RegularMaps {
            t: -e * a,
            x: e * b,
            jacobian: [[-(e1 * a + e * a1), -(e2 * a + e * a2)], [e1 * b + e * b1, e2 * b + e * b2]],
        })
    }

    /// `r³` at a point where `(r¹, r²)` are already known.
    pub fn r3(&self, r1: f64, r2: f64, t: f64, x: f64) -> Result<f64, SolutionError> {
        match self {
            ImplicitSolution::Regular { psi, w } => {
                let p = |m, n| psi.eval(r1, r2, m, n);
                w.eval((0.5 * (r1 - r2)).exp() * (p(1, 0) - p(0, 1) - p(0, 0)), 0)
            }
            ImplicitSolution::Singular { side: Side::R1, theta, w, .. } => {
                w.eval((-r2).exp() * t - theta.eval(r2, 1)? - theta.eval(r2, 0)?, 0)
            }
            ImplicitSolution::Singular { side: Side::R2, theta, w, .. } => {
                w.eval(r1.exp() * t + theta.eval(r1, 1)? - theta.eval(r1, 0)?, 0)
            }
            ImplicitSolution::Ultra { c1, c2, w } => w.eval(x - (c1 + c2) * t, 0),
        }
    }

    /// The implicit equations `F(r¹, r²; t, x) = 0` and their Jacobian with
    /// respect to `(r¹, r²)`. For the singular families the second row pins
    /// the constant invariant.
    pub(crate) fn system(&self, r: [f64; 2], t: f64, x: f64) -> Result<([f64; 2], [[f64; 2]; 2]), SolutionError> {
        match self {
            ImplicitSolution::Regular { .. } => {
                let m = self.regular_maps(r[0], r[1]).unwrap();
                Ok(([m.t - t, m.x - x], m.jacobian))
            }
            ImplicitSolution::Singular { side, c, theta, .. } => {
                let (k, s) = match side {
                    Side::R1 => (1, r[1]),
                    Side::R2 => (0, r[0]),
                };
                let (th1, th2) = (theta.eval(s, 1)?, theta.eval(s, 2)?);
                // r¹ = c: x = (r²+c−1)t + e^{r²}Θ²′;  r² = c: x = (r¹+c+1)t + e^{−r¹}Θ¹′.
                let (f, df) = match side {
                    Side::R1 => (
                        (s + c - 1.0) * t + s.exp() * th1 - x,
                        t + s.exp() * (th1 + th2),
                    ),
                    Side::R2 => (
                        (s + c + 1.0) * t + (-s).exp() * th1 - x,
                        t + (-s).exp() * (th2 - th1),
                    ),
                };
                let fixed = r[1 - k] - c;
                let mut jac = [[0.0; 2]; 2];
                jac[0][k] = df;
                jac[1][1 - k] = 1.0;
                Ok(([f, fixed], jac))
            }
            ImplicitSolution::Ultra { c1, c2, .. } => {
                Ok(([r[0] - c1, r[1] - c2], [[1.0, 0.0], [0.0, 1.0]]))
            }
        }
    }

    /// The point `(t, x)` solved exactly by `(r¹, r²)`, when the family
    /// determines one.
    pub fn image_of(&self, r: [f64; 2]) -> Option<(f64, f64)> {
        self.regular_maps(r[0], r[1]).map(|m| (m.t, m.x))
    }
}
