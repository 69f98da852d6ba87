//! The nonlocal recursion operator `ℜ₄η = Bη + CY` with the potential
//! `𝒟ₓY = η¹+η²`, `𝒟ₜY = −V¹η¹ − V²η²`.

use std::fmt;

use expr_kernel::{diff_partial, Atom, DiffFunction, Q};
use jet_calculus::{to_standard, velocity, Report};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use solutions::{interior_norms, GridField, Norms};
use symmetry::EvolutionaryField;

use crate::RecursionError;

/// `B = diag(b)`, `C = c·(r¹ₓ, r²ₓ, r³ₓ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct R4 {
    pub b: [Q; 3],
    pub c: Q,
}

impl R4 {
    /// `B = diag(2, −2, 0)`, `C = rₓ`.
    pub fn printed() -> R4 {
        R4 {
            b: [Q::from_integer(2), Q::from_integer(-2), Q::from_integer(0)],
            c: Q::from_integer(1),
        }
    }

    /// `B = diag(1, −1, 0)`, `C = rₓ`: the variant that maps solutions of the
    /// linearized system to solutions.
    pub fn resolved() -> R4 {
        R4 {
            b: [Q::from_integer(1), Q::from_integer(-1), Q::from_integer(0)],
            c: Q::from_integer(1),
        }
    }

    pub fn b_matrix(&self) -> [[DiffFunction; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { DiffFunction::constant(self.b[i]) } else { DiffFunction::zero() })
        })
    }

    pub fn c_column(&self) -> [DiffFunction; 3] {
        std::array::from_fn(|i| DiffFunction::r(i as u8 + 1, 1).scale(self.c))
    }

    /// Substitutes `A = 0` and this `B`, `C` into the determining system.
    pub fn determining(&self) -> Result<R4Determining, RecursionError> {
        let zero: [[DiffFunction; 3]; 3] = Default::default();
        r4_determining_check(&zero, &self.b_matrix(), &self.c_column())
    }
}

impl fmt::Display for R4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R4[B=diag({},{},{}), C={}*r_x]", self.b[0], self.b[1], self.b[2], self.c)
    }
}

/// Residual expressions of the four determining equations for `(A, B, C)`.
#[derive(Clone, Debug)]
pub struct R4Determining {
    /// `A^{kk'}(V^k − V^{k'})` and the `D_xη` equations.
    pub a_eqs: Report,
    /// The `η` equations, indexed by `(k, k')`.
    pub b_eqs: Vec<((usize, usize), DiffFunction)>,
    pub b_report: Report,
    /// The `Y` equations.
    pub c_eqs: Report,
}

fn v(k: usize) -> DiffFunction {
    velocity(k as u8 + 1)
}

fn rx(k: usize, n: u32) -> DiffFunction {
    DiffFunction::r(k as u8 + 1, n)
}

fn d_r(e: &DiffFunction, l: usize) -> DiffFunction {
    diff_partial(e, &Atom::r(l as u8 + 1, 0))
}

fn d_rx(e: &DiffFunction, l: usize) -> DiffFunction {
    diff_partial(e, &Atom::r(l as u8 + 1, 1))
}

fn delta12(k: usize) -> bool {
    k < 2
}

/// The transport part `X^k(F) = F_{r^l}(V^k−V^l)r^l_x + F_{r^l_x}((V^k−V^l)r^l_xx − (r¹ₓ+r²ₓ)r^l_x)`.
fn transport(f: &DiffFunction, k: usize) -> DiffFunction {
    let s = rx(0, 1) + rx(1, 1);
    let mut out = DiffFunction::zero();
    for l in 0..3 {
        let dv = v(k) - v(l);
        out += d_r(f, l) * &dv * rx(l, 1);
        out += d_rx(f, l) * (&dv * &rx(l, 2) - &s * &rx(l, 1));
    }
    out
}

/// Residuals of the determining system for `ℜ₄η = A𝒟ₓη + Bη + CY`.
pub fn r4_determining_check(
    a: &[[DiffFunction; 3]; 3],
    b: &[[DiffFunction; 3]; 3],
    c: &[DiffFunction; 3],
) -> Result<R4Determining, RecursionError> {
    let mut a_std = a.clone();
    let mut b_std = b.clone();
    let mut c_std = c.clone();
    for i in 0..3 {
        for j in 0..3 {
            a_std[i][j] = to_standard(&a[i][j])?;
            b_std[i][j] = to_standard(&b[i][j])?;
        }
        c_std[i] = to_standard(&c[i])?;
    }
    let (a, b, c) = (a_std, b_std, c_std);
    let s = rx(0, 1) + rx(1, 1);

    let mut a_res = Vec::new();
    let mut b_res = Vec::new();
    for k in 0..3 {
        for kp in 0..3 {
            a_res.push(&a[k][kp] * &(v(k) - v(kp)));

            let mut e2 = DiffFunction::zero();
            for l in 0..3 {
                e2 += d_r(&a[k][kp], l) * (v(k) - v(l)) * rx(l, 1);
            }
            e2 -= &a[k][kp] * &s;
            if delta12(kp) {
                for j in 0..3 {
                    e2 -= &a[k][j] * &rx(j, 1);
                }
            }
            e2 += (v(k) - v(kp)) * &b[k][kp];
            e2 += rx(k, 1) * (&a[0][kp] + &a[1][kp]);
            a_res.push(e2);

            let mut e3 = transport(&b[k][kp], k) + rx(k, 1) * (&b[0][kp] + &b[1][kp]);
            if delta12(kp) {
                let mut inner = -((v(k) - v(kp)) * &c[k]);
                for j in 0..3 {
                    inner += &a[k][j] * &rx(j, 2) + &b[k][j] * &rx(j, 1);
                }
                e3 -= inner;
            }
            b_res.push(((k, kp), e3));
        }
    }
    let c_res = (0..3).map(|k| transport(&c[k], k) + rx(k, 1) * (&c[0] + &c[1])).collect();
    let b_report = Report::from_residuals(b_res.iter().map(|(_, e)| e.clone()).collect())?;
    let b_eqs = b_res
        .into_iter()
        .zip(&b_report.residuals)
        .map(|((idx, _), e)| (idx, e.clone()))
        .collect();
    Ok(R4Determining {
        a_eqs: Report::from_residuals(a_res)?,
        b_eqs,
        b_report,
        c_eqs: Report::from_residuals(c_res)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct R4Config {
    /// Allowed `|Y_t − (−V¹η¹ − V²η²)|`, relative to `1 + max|V¹η¹ + V²η²|`.
    pub quad_tol: f64,
    /// Pass threshold for the max-norm of the linearized residual of `ℜ₄η`,
    /// relative to `1 + max|ℜ₄η|`.
    pub pass_tol: f64,
}

impl Default for R4Config {
    fn default() -> Self {
        R4Config {
            quad_tol: 1e-4,
            pass_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct R4Report {
    pub operator: String,
    /// Potential on the grid, NaN where undefined.
    pub potential: Vec<f64>,
    /// Centred `Y_t` against the defining flux.
    pub y_discrepancy: Norms,
    /// Residual of `ζᵏₜ + Vᵏζᵏₓ + rᵏₓ(ζ¹+ζ²)` for `ζ = ℜ₄η`.
    pub residual: [Norms; 3],
    /// `max |ζ|`.
    pub scale: f64,
    pub pass: bool,
}

impl R4Report {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().map(|n| n.max).fold(0.0, f64::max)
    }
}

/// Evaluates `ℜ₄η` on a sampled solution. `Y` is integrated by the trapezoid
/// rule in `t` along the first column where `η` is defined, then in `x` along
/// every time slice.
pub fn apply_r4(eta: &EvolutionaryField, f: &GridField, r4: &R4, cfg: &R4Config) -> Result<R4Report, RecursionError> {
    let spec = f.spec;
    let (nt, nx) = (spec.nt, spec.nx);
    let vals: Vec<Vec<f64>> = eta.eta.iter().map(|e| f.eval_on_grid(e)).collect::<Result<_, _>>()?;
    let defined = |i: usize| (0..nt).all(|j| vals.iter().all(|v| v[spec.index(j, i)].is_finite()));
    let ia = (0..nx).find(|&i| defined(i)).ok_or_else(|| RecursionError::BadSpec("η undefined on the grid".into()))?;
    let ib = (0..nx).rev().find(|&i| defined(i)).unwrap();

    let k = |j, i| spec.index(j, i);
    let flux: Vec<f64> = (0..spec.len())
        .map(|n| {
            let v1 = f.r[0][n] + f.r[1][n] + 1.0;
            let v2 = f.r[0][n] + f.r[1][n] - 1.0;
            -(v1 * vals[0][n] + v2 * vals[1][n])
        })
        .collect();
    let mut anchor = vec![0.0; nt];
    for j in 1..nt {
        anchor[j] = anchor[j - 1] + 0.5 * spec.dt * (flux[k(j - 1, ia)] + flux[k(j, ia)]);
    }
    let rows: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|j| {
            let mut row = vec![f64::NAN; nx];
            row[ia] = anchor[j];
            for i in ia + 1..=ib {
                let g = |i| vals[0][k(j, i)] + vals[1][k(j, i)];
                row[i] = row[i - 1] + 0.5 * spec.dx * (g(i - 1) + g(i));
            }
            row
        })
        .collect();
    let y: Vec<f64> = rows.into_iter().flatten().collect();

    let y_discrepancy = interior_norms(&spec, |j, i| f.d_t(&y, j, i) - flux[k(j, i)]);
    let flux_scale = flux.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let tolerance = cfg.quad_tol * (1.0 + flux_scale);
    if !(y_discrepancy.max <= tolerance) {
        return Err(RecursionError::QuadratureInconsistent {
            discrepancy: y_discrepancy.max,
            tolerance,
        });
    }

    let b: [f64; 3] = r4.b.map(|x| x.to_f64().unwrap());
    let c = r4.c.to_f64().unwrap();
    let zeta: Vec<Vec<f64>> = (0..3)
        .map(|comp| {
            (0..spec.len())
                .map(|n| {
                    let (j, i) = (n / nx, n % nx);
                    b[comp] * vals[comp][n] + c * f.d_x(&f.r[comp], j, i) * y[n]
                })
                .collect()
        })
        .collect();
    let shift = [1.0, -1.0, 0.0];
    let residual: [Norms; 3] = std::array::from_fn(|comp| {
        interior_norms(&spec, |j, i| {
            let n = k(j, i);
            let vk = f.r[0][n] + f.r[1][n] + shift[comp];
            f.d_t(&zeta[comp], j, i)
                + vk * f.d_x(&zeta[comp], j, i)
                + f.d_x(&f.r[comp], j, i) * (zeta[0][n] + zeta[1][n])
        })
    });
    let scale = zeta.iter().flatten().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let pass = residual.iter().all(|n| n.max <= cfg.pass_tol * (1.0 + scale));
    Ok(R4Report {
        operator: r4.to_string(),
        potential: y,
        y_discrepancy,
        residual,
        scale,
        pass,
    })
}
