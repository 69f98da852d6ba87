//! Uniform `(t, x)` grids, Newton continuation and finite-difference residuals.

use std::io::Write;

use conservation::ConservedCurrent;
use expr_kernel::{eval_numeric, Atom, DiffFunction, Instantiation, Point};
use jet_calculus::to_standard;
use rayon::prelude::*;

use crate::family::ImplicitSolution;
use crate::SolutionError;

const STEP_TOL: f64 = 1e-12;
const MAX_ITER: usize = 50;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub t0: f64,
    pub x0: f64,
    pub dt: f64,
    pub dx: f64,
    pub nt: usize,
    pub nx: usize,
}

impl GridSpec {
    pub fn new(t0: f64, x0: f64, dt: f64, dx: f64, nt: usize, nx: usize) -> Result<GridSpec, SolutionError> {
        if nt < 5 || nx < 5 {
            return Err(SolutionError::InvalidGrid(format!("need at least 5×5 nodes, got {nt}×{nx}")));
        }
        if !(dt > 0.0 && dx > 0.0 && t0.is_finite() && x0.is_finite()) {
            return Err(SolutionError::InvalidGrid(format!("bad steps dt = {dt}, dx = {dx}")));
        }
        Ok(GridSpec { t0, x0, dt, dx, nt, nx })
    }

    /// `nt × nx` nodes covering `[tc − ht, tc + ht] × [xc − hx, xc + hx]`.
    pub fn centered(tc: f64, xc: f64, ht: f64, hx: f64, nt: usize, nx: usize) -> Result<GridSpec, SolutionError> {
        if nt < 2 || nx < 2 {
            return Err(SolutionError::InvalidGrid(format!("{nt}×{nx}")));
        }
        let dt = 2.0 * ht / (nt - 1) as f64;
        let dx = 2.0 * hx / (nx - 1) as f64;
        GridSpec::new(tc - ht, xc - hx, dt, dx, nt, nx)
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn index(&self, j: usize, i: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn nearest(&self, t: f64, x: f64) -> (usize, usize) {
        let clamp = |v: f64, n: usize| (v.round().max(0.0) as usize).min(n - 1);
        (clamp((t - self.t0) / self.dt, self.nt), clamp((x - self.x0) / self.dx, self.nx))
    }
}

/// Summary of the inversion over the whole grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonCertificate {
    /// Largest residual of the implicit equations at an accepted node.
    pub max_residual: f64,
    pub max_iterations: usize,
    /// Largest change of `r¹` or `r²` between neighbouring nodes.
    pub max_jump: f64,
    /// `min |r¹ₓr²ₓ|` over the grid, for the regular family.
    pub min_nondegeneracy: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GridField {
    pub spec: GridSpec,
    /// `r¹, r², r³`, row-major in `(t, x)`.
    pub r: [Vec<f64>; 3],
    pub certificate: NewtonCertificate,
}

#[derive(Clone, Copy, Debug)]
struct Solved {
    r: [f64; 2],
    residual: f64,
    iterations: usize,
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn newton(
    sol: &ImplicitSolution,
    t: f64,
    x: f64,
    guess: [f64; 2],
    node: (usize, usize),
) -> Result<Solved, SolutionError> {
    let mut r = guess;
    let (mut f, mut jac) = sol.system(r, t, x)?;
    for it in 1..=MAX_ITER {
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if !det.is_finite() || det.abs() <= 1e-13 * scale * scale {
            return Err(SolutionError::JacobianSingular { node });
        }
        let step = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
        ];
        let f0 = norm(f);
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-8 {
            let trial = [r[0] + lambda * step[0], r[1] + lambda * step[1]];
            if let Ok((ft, jt)) = sol.system(trial, t, x) {
                let n = norm(ft);
                if n.is_finite() && (n < f0 || f0 < RESIDUAL_TOL) {
                    accepted = Some((trial, ft, jt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, ft, jt)) = accepted else {
            return Err(SolutionError::NewtonDiverged { node });
        };
        r = trial;
        f = ft;
        jac = jt;
        if lambda * norm(step) < STEP_TOL {
            return Ok(Solved {
                r,
                residual: norm(f),
                iterations: it,
            });
        }
    }
    if norm(f) < RESIDUAL_TOL {
        Ok(Solved {
            r,
            residual: norm(f),
            iterations: MAX_ITER,
        })
    } else {
        Err(SolutionError::NewtonDiverged { node })
    }
}

/// Samples `sol` on the grid. The node nearest the image of `seed` (or the
/// grid centre, for families without an explicit image) is solved first from
/// `seed`; its row is swept outward in `x`, then every column outward in `t`,
/// each node starting from its solved neighbour.
pub fn sample_on_grid(sol: &ImplicitSolution, spec: &GridSpec, seed: [f64; 2]) -> Result<GridField, SolutionError> {
    let (nt, nx) = (spec.nt, spec.nx);
    let (j0, i0) = match sol.image_of(seed) {
        Some((t, x)) => spec.nearest(t, x),
        None => (nt / 2, nx / 2),
    };
    let solve = |j: usize, i: usize, guess: [f64; 2]| newton(sol, spec.t(j), spec.x(i), guess, (j, i));

    let mut row: Vec<Option<Solved>> = vec![None; nx];
    row[i0] = Some(solve(j0, i0, seed)?);
    for i in i0 + 1..nx {
        row[i] = Some(solve(j0, i, row[i - 1].unwrap().r)?);
    }
    for i in (0..i0).rev() {
        row[i] = Some(solve(j0, i, row[i + 1].unwrap().r)?);
    }

    let columns = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut col: Vec<Option<Solved>> = vec![None; nt];
            col[j0] = row[i];
            for j in j0 + 1..nt {
                col[j] = Some(solve(j, i, col[j - 1].unwrap().r)?);
            }
            for j in (0..j0).rev() {
                col[j] = Some(solve(j, i, col[j + 1].unwrap().r)?);
            }
            Ok(col.into_iter().map(Option::unwrap).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, SolutionError>>()?;

    let mut r = [vec![0.0; spec.len()], vec![0.0; spec.len()], vec![0.0; spec.len()]];
    let mut cert = NewtonCertificate {
        max_residual: 0.0,
        max_iterations: 0,
        max_jump: 0.0,
        min_nondegeneracy: None,
    };
    for (i, col) in columns.iter().enumerate() {
        for (j, s) in col.iter().enumerate() {
            let k = spec.index(j, i);
            r[0][k] = s.r[0];
            r[1][k] = s.r[1];
            cert.max_residual = cert.max_residual.max(s.residual);
            cert.max_iterations = cert.max_iterations.max(s.iterations);
        }
    }
    let r3: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let (j, i) = (k / nx, k % nx);
            sol.r3(r[0][k], r[1][k], spec.t(j), spec.x(i))
        })
        .collect::<Result<_, _>>()?;
    r[2] = r3;
    if let Some(k) = r.iter().flatten().position(|v| !v.is_finite()) {
        let k = k % spec.len();
        return Err(SolutionError::NonFinite { node: (k / nx, k % nx) });
    }

    let limit = 10.0 * spec.dx.max(spec.dt);
    for j in 0..nt {
        for i in 0..nx {
            for (dj, di) in [(0, 1), (1, 0)] {
                if j + dj >= nt || i + di >= nx {
                    continue;
                }
                let (a, b) = (spec.index(j, i), spec.index(j + dj, i + di));
                let jump = (r[0][a] - r[0][b]).abs().max((r[1][a] - r[1][b]).abs());
                cert.max_jump = cert.max_jump.max(jump);
                if jump > limit {
                    return Err(SolutionError::BranchJump { node: (j + dj, i + di), jump });
                }
            }
        }
    }
    if matches!(sol, ImplicitSolution::Regular { .. }) {
        let m = (0..spec.len())
            .map(|k| {
                let [a, b] = sol.regular_maps(r[0][k], r[1][k]).unwrap().r_x();
                (a * b).abs()
            })
            .fold(f64::INFINITY, f64::min);
        cert.min_nondegeneracy = Some(m);
    }
    Ok(GridField {
        spec: *spec,
        r,
        certificate: cert,
    })
}

/// Maximum and `L²` norms of a residual over a set of nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub max: f64,
    pub l2: f64,
}

/// Norms of `f(j, i)` over interior nodes, skipping nodes where `f` is not
/// finite (values that need a wider stencil than the grid offers).
pub fn interior_norms<F>(spec: &GridSpec, f: F) -> Norms
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let (max, sq) = (1..spec.nt - 1)
        .into_par_iter()
        .map(|j| {
            let mut max = 0.0f64;
            let mut sq = 0.0;
            for i in 1..spec.nx - 1 {
                let v = f(j, i);
                if v.is_finite() {
                    max = max.max(v.abs());
                    sq += v * v;
                }
            }
            (max, sq)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1 + b.1));
    Norms {
        max,
        l2: (sq * spec.dt * spec.dx).sqrt(),
    }
}

/// Observed orders `log₂(eₖ/eₖ₊₁)` for errors on successively halved grids.
pub fn convergence_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

impl GridField {
    pub fn value(&self, comp: usize, j: usize, i: usize) -> f64 {
        self.r[comp][self.spec.index(j, i)]
    }

    /// Centred `∂ₜ` of a nodal array; NaN on the first and last time rows.
    pub fn d_t(&self, v: &[f64], j: usize, i: usize) -> f64 {
        if j == 0 || j + 1 >= self.spec.nt {
            return f64::NAN;
        }
        (v[self.spec.index(j + 1, i)] - v[self.spec.index(j - 1, i)]) / (2.0 * self.spec.dt)
    }

    /// Centred `∂ₓ` of a nodal array; NaN on the boundary columns.
    pub fn d_x(&self, v: &[f64], j: usize, i: usize) -> f64 {
        if i == 0 || i + 1 >= self.spec.nx {
            return f64::NAN;
        }
        (v[self.spec.index(j, i + 1)] - v[self.spec.index(j, i - 1)]) / (2.0 * self.spec.dx)
    }

    fn d_xx(&self, v: &[f64], j: usize, i: usize) -> f64 {
        if i == 0 || i + 1 >= self.spec.nx {
            return f64::NAN;
        }
        let k = self.spec.index(j, i);
        (v[k + 1] - 2.0 * v[k] + v[k - 1]) / (self.spec.dx * self.spec.dx)
    }

    /// Evaluates a function on the restricted jet of order `≤ 2` at every
    /// node, with `x`-derivatives of `r` taken by centred differences. Nodes
    /// without a full stencil get NaN.
    pub fn eval_on_grid(&self, e: &DiffFunction) -> Result<Vec<f64>, SolutionError> {
        let e = to_standard(e)?;
        let mut order = 0;
        for a in e.base_atoms() {
            match a {
                Atom::T | Atom::X => {}
                Atom::R(_, k) if k <= 2 => order = order.max(k),
                other => return Err(SolutionError::UnsupportedJet(other.to_string())),
            }
        }
        let spec = self.spec;
        let inst = Instantiation::new();
        (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let (j, i) = (k / spec.nx, k % spec.nx);
                if order > 0 && (i == 0 || i + 1 >= spec.nx) {
                    return Ok(f64::NAN);
                }
                let mut p = Point::new();
                p.insert(Atom::T, spec.t(j));
                p.insert(Atom::X, spec.x(i));
                for c in 0..3 {
                    p.insert(Atom::r(c as u8 + 1, 0), self.r[c][k]);
                    if order > 0 {
                        p.insert(Atom::r(c as u8 + 1, 1), self.d_x(&self.r[c], j, i));
                        p.insert(Atom::r(c as u8 + 1, 2), self.d_xx(&self.r[c], j, i));
                    }
                }
                Ok(eval_numeric(&e, &p, &inst)?)
            })
            .collect()
    }

    /// Centred residuals of `rⁱₜ + Vⁱrⁱₓ` over interior nodes.
    pub fn pde_residual(&self) -> [Norms; 3] {
        let shift = [1.0, -1.0, 0.0];
        std::array::from_fn(|c| {
            interior_norms(&self.spec, |j, i| {
                let k = self.spec.index(j, i);
                let v = self.r[0][k] + self.r[1][k] + shift[c];
                self.d_t(&self.r[c], j, i) + v * self.d_x(&self.r[c], j, i)
            })
        })
    }

    /// Centred residual of `𝒟ₜρ + 𝒟ₓσ`.
    pub fn conservation_residual(&self, cur: &ConservedCurrent) -> Result<Norms, SolutionError> {
        let rho = self.eval_on_grid(&cur.rho)?;
        let sigma = self.eval_on_grid(&cur.sigma)?;
        Ok(interior_norms(&self.spec, |j, i| self.d_t(&rho, j, i) + self.d_x(&sigma, j, i)))
    }

    /// Rows `t,x,r1,r2,r3`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,r1,r2,r3")?;
        for j in 0..self.spec.nt {
            for i in 0..self.spec.nx {
                let k = self.spec.index(j, i);
                writeln!(
                    w,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    self.spec.t(j),
                    self.spec.x(i),
                    self.r[0][k],
                    self.r[1][k],
                    self.r[2][k]
                )?;
            }
        }
        Ok(())
    }
}

pub fn pde_residual(f: &GridField) -> [Norms; 3] {
    f.pde_residual()
}

pub fn conservation_residual(f: &GridField, cur: &ConservedCurrent) -> Result<Norms, SolutionError> {
    f.conservation_residual(cur)
}
