//! Diagonal metrics on the space of Riemann invariants `(r¹, r², r³)`:
//! Levi-Civita connection, curvature, Nijenhuis torsion and the covariant
//! compatibility conditions for a pair of metrics.

use expr_kernel::{diff_partial, Atom, DiffFunction};
use jet_calculus::{to_standard, Report};

use crate::{make_h, HamiltonianError, HamiltonianOperator};

pub type Matrix3 = [[DiffFunction; 3]; 3];
pub type Tensor3 = [[[DiffFunction; 3]; 3]; 3];
pub type Tensor4 = [[[[DiffFunction; 3]; 3]; 3]; 3];

fn d(e: &DiffFunction, i: usize) -> DiffFunction {
    diff_partial(e, &Atom::r(i as u8 + 1, 0))
}

fn delta(a: usize, b: usize, e: &DiffFunction) -> DiffFunction {
    if a == b {
        e.clone()
    } else {
        DiffFunction::zero()
    }
}

/// A diagonal metric, held both covariantly and contravariantly.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    lower: [DiffFunction; 3],
    upper: [DiffFunction; 3],
}

impl Metric {
    /// From `g_{ii}`.
    pub fn from_lower(diag: [DiffFunction; 3]) -> Result<Metric, HamiltonianError> {
        if let Some(i) = diag.iter().position(DiffFunction::is_zero) {
            return Err(HamiltonianError::DegenerateMetric(format!("g_{{{i}{i}}} = 0")));
        }
        let upper = diag.clone().map(|e| e.pow(-1));
        Ok(Metric { lower: diag, upper })
    }

    /// From `g^{ii}`, the leading coefficients of a hydrodynamic operator.
    pub fn from_upper(diag: [DiffFunction; 3]) -> Result<Metric, HamiltonianError> {
        let m = Metric::from_lower(diag)?;
        Ok(Metric {
            lower: m.upper,
            upper: m.lower,
        })
    }

    pub fn lower(&self) -> &[DiffFunction; 3] {
        &self.lower
    }

    pub fn upper(&self) -> &[DiffFunction; 3] {
        &self.upper
    }

    /// `Γ^i_{jk}`.
    pub fn christoffel(&self) -> Tensor3 {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let s = delta(i, k, &d(&self.lower[i], j)) + delta(i, j, &d(&self.lower[i], k))
                        - delta(j, k, &d(&self.lower[j], i));
                    (&self.upper[i] * &s).scale(expr_kernel::q(1, 2))
                })
            })
        })
    }
}

/// Leading coefficients of `ℌ_Θ`.
pub fn metric_of(h: &HamiltonianOperator) -> Result<Metric, HamiltonianError> {
    let op = h.operator();
    for i in 0..3 {
        for j in 0..3 {
            if i != j && !op.get(i, j).coefficient(0, 1).is_zero() {
                return Err(HamiltonianError::NotHydrodynamic(format!("off-diagonal D_x term at ({i}, {j})")));
            }
        }
    }
    Metric::from_upper(std::array::from_fn(|i| op.get(i, i).coefficient(0, 1)))
}

/// `R^i_{jkl} = ∂_kΓ^i_{lj} − ∂_lΓ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}`.
pub fn riemann_curvature(g: &Metric) -> Tensor4 {
    let gam = g.christoffel();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    let mut r = d(&gam[i][l][j], k) - d(&gam[i][k][j], l);
                    for m in 0..3 {
                        r += &gam[i][k][m] * &gam[m][l][j];
                        r -= &gam[i][l][m] * &gam[m][k][j];
                    }
                    r
                })
            })
        })
    })
}

fn flatten4(t: &Tensor4) -> Vec<DiffFunction> {
    t.iter().flatten().flatten().flatten().cloned().collect()
}

/// Every curvature component vanishes.
pub fn is_flat(g: &Metric) -> Result<bool, HamiltonianError> {
    Ok(Report::from_residuals(flatten4(&riemann_curvature(g)))?.pass)
}

/// Residuals of `g^{il}Γ^j_{lk} = −b^{ij}_k`, where `b^{ij}_k rᵏₓ` is the
/// zeroth-order part of `ℌ^{ij}`, plus the check that this part is linear in
/// the first derivatives.
pub fn connection_matches(h: &HamiltonianOperator) -> Result<Report, HamiltonianError> {
    let g = metric_of(h)?;
    let gam = g.christoffel();
    let op = h.operator();
    let mut res = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let c = to_standard(&op.get(i, j).coefficient(0, 0))?;
            let mut rest = c.clone();
            for k in 0..3 {
                let rk = Atom::r(k as u8 + 1, 1);
                let b = diff_partial(&c, &rk);
                rest -= &b * &DiffFunction::atom(rk);
                res.push(&g.upper[i] * &gam[j][i][k] + b);
            }
            res.push(rest);
        }
    }
    Ok(Report::from_residuals(res)?)
}

/// `N^i_{jk} = s^l_j∂_l s^i_k − s^l_k∂_l s^i_j − s^i_l(∂_j s^l_k − ∂_k s^l_j)`.
pub fn nijenhuis(s: &Matrix3) -> Tensor3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let mut n = DiffFunction::zero();
                for l in 0..3 {
                    n += &s[l][j] * &d(&s[i][k], l);
                    n -= &s[l][k] * &d(&s[i][j], l);
                    n -= &s[i][l] * &(d(&s[l][k], j) - d(&s[l][j], k));
                }
                n
            })
        })
    })
}

/// `∇ⁱ∇ʲg̃^{kl} + ∇ᵏ∇ˡg̃^{ij} − ∇ⁱ∇ᵏg̃^{jl} − ∇ʲ∇ˡg̃^{ik}`, with `∇` the
/// Levi-Civita connection of `g`.
pub fn covariant_compatibility(g: &Metric, gt: &Metric) -> Tensor4 {
    let gam = g.christoffel();
    let t = |k: usize, l: usize| delta(k, l, &gt.upper[k]);
    // S[m][k][l] = ∇_m g̃^{kl}
    let s: Tensor3 = std::array::from_fn(|m| {
        std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let mut v = d(&t(k, l), m);
                for p in 0..3 {
                    v += &gam[k][m][p] * &t(p, l);
                    v += &gam[l][m][p] * &t(k, p);
                }
                v
            })
        })
    });
    // C[n][m][k][l] = ∇_n∇_m g̃^{kl}
    let c: Tensor4 = std::array::from_fn(|n| {
        std::array::from_fn(|m| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    let mut v = d(&s[m][k][l], n);
                    for p in 0..3 {
                        v -= &gam[p][n][m] * &s[p][k][l];
                        v += &gam[k][n][p] * &s[m][p][l];
                        v += &gam[l][n][p] * &s[m][k][p];
                    }
                    v
                })
            })
        })
    });
    let up = |a: usize, b: usize, k: usize, l: usize| &(&g.upper[a] * &g.upper[b]) * &c[a][b][k][l];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| up(i, j, k, l) + up(k, l, i, j) - up(i, k, j, l) - up(j, l, i, k))
            })
        })
    })
}

/// Compatibility of `ℌ_{Θ₁}` and `ℌ_{Θ₂}`: Nijenhuis torsion of
/// `s = g̃g⁻¹` and the covariant conditions.
pub fn compatibility_check(theta1: &DiffFunction, theta2: &DiffFunction) -> Result<Report, HamiltonianError> {
    let g = metric_of(&make_h(theta1)?)?;
    let gt = metric_of(&make_h(theta2)?)?;
    let s: Matrix3 = std::array::from_fn(|i| std::array::from_fn(|j| delta(i, j, &(&gt.upper[i] * &g.lower[i]))));
    let mut res: Vec<DiffFunction> = nijenhuis(&s).iter().flatten().flatten().cloned().collect();
    res.extend(flatten4(&covariant_compatibility(&g, &gt)));
    Ok(Report::from_residuals(res)?)
}
