//! Matrix differential operators in the total derivatives, Fréchet
//! derivatives and formal adjoints.

use std::collections::BTreeMap;
use std::fmt;

use expr_kernel::{diff_partial, Atom, DiffFunction};

use crate::total::{full_dt_ctx, full_dx_ctx, to_standard, total_dt, total_dx};
use crate::{jet_is_zero, JetContext, JetError, Mode};

/// `Σ c_{ab} D_t^a D_x^b`, keyed by `(a, b)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32), DiffFunction>,
}

fn dx(e: &DiffFunction, ctx: &JetContext) -> DiffFunction {
    if ctx.mode == Mode::OffShell {
        full_dx_ctx(e, ctx)
    } else {
        total_dx(e, ctx)
    }
}

fn dt(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, JetError> {
    if ctx.mode == Mode::OffShell {
        full_dt_ctx(e, ctx)
    } else {
        total_dt(e, ctx)
    }
}

fn derivative(e: &DiffFunction, a: u32, b: u32, ctx: &JetContext) -> Result<DiffFunction, JetError> {
    let mut v = e.clone();
    for _ in 0..b {
        v = dx(&v, ctx);
    }
    for _ in 0..a {
        v = dt(&v, ctx)?;
    }
    Ok(v)
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl DiffOp {
    pub fn zero() -> DiffOp {
        DiffOp::default()
    }

    /// Multiplication by `c`.
    pub fn mul(c: DiffFunction) -> DiffOp {
        DiffOp::term(c, 0, 0)
    }

    /// `c D_x^k`.
    pub fn dx(c: DiffFunction, k: u32) -> DiffOp {
        DiffOp::term(c, 0, k)
    }

    /// `c D_t^a D_x^b`.
    pub fn term(c: DiffFunction, a: u32, b: u32) -> DiffOp {
        let mut op = DiffOp::zero();
        op.add_term(c, a, b);
        op
    }

    pub fn add_term(&mut self, c: DiffFunction, a: u32, b: u32) {
        let slot = self.terms.entry((a, b)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &DiffFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: u32, b: u32) -> DiffFunction {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest power of `D_x`, ignoring `D_t`.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(c.clone(), *a, *b);
        }
        out
    }

    pub fn neg(&self) -> DiffOp {
        self.left_mul(&DiffFunction::int(-1))
    }

    /// `f ∘ self`.
    pub fn left_mul(&self, f: &DiffFunction) -> DiffOp {
        let mut out = DiffOp::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(f * c, *a, *b);
        }
        out
    }

    pub fn apply(&self, f: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, JetError> {
        let mut out = DiffFunction::zero();
        for ((a, b), c) in &self.terms {
            out += c * &derivative(f, *a, *b, ctx)?;
        }
        Ok(out)
    }

    /// `self ∘ other`, expanded by the Leibniz rule.
    pub fn compose(&self, other: &DiffOp, ctx: &JetContext) -> Result<DiffOp, JetError> {
        let mut out = DiffOp::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                for l in 0..=*a1 {
                    for m in 0..=*b1 {
                        let k = binomial(*a1, l) * binomial(*b1, m);
                        let d = derivative(c2, l, m, ctx)?;
                        out.add_term((c1 * &d).scale_int(k), a1 - l + a2, b1 - m + b2);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint `Σ (−D_t)^a (−D_x)^b ∘ c_{ab}`.
    pub fn adjoint(&self, ctx: &JetContext) -> Result<DiffOp, JetError> {
        let mut out = DiffOp::zero();
        for ((a, b), c) in &self.terms {
            let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
            for l in 0..=*a {
                for m in 0..=*b {
                    let k = sign * binomial(*a, l) * binomial(*b, m);
                    let d = derivative(c, l, m, ctx)?;
                    out.add_term(d.scale_int(k), a - l, b - m);
                }
            }
        }
        Ok(out)
    }

    /// Coefficientwise equality modulo coordinate identities.
    pub fn same(&self, other: &DiffOp) -> Result<bool, JetError> {
        for (_, c) in self.add(&other.neg()).terms() {
            if !jet_is_zero(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| match (a, b) {
                (0, 0) => format!("{c}"),
                (0, b) => format!("{c}·Dx^{b}"),
                (a, 0) => format!("{c}·Dt^{a}"),
                (a, b) => format!("{c}·Dt^{a}·Dx^{b}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An `n × n` matrix of [`DiffOp`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDiffOperator {
    n: usize,
    entries: Vec<DiffOp>,
}

impl MatrixDiffOperator {
    pub fn zero(n: usize) -> MatrixDiffOperator {
        MatrixDiffOperator {
            n,
            entries: vec![DiffOp::zero(); n * n],
        }
    }

    pub fn diagonal(ops: Vec<DiffOp>) -> MatrixDiffOperator {
        let n = ops.len();
        let mut m = MatrixDiffOperator::zero(n);
        for (i, op) in ops.into_iter().enumerate() {
            m.set(i, i, op);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &DiffOp {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, op: DiffOp) {
        self.entries[i * self.n + j] = op;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut DiffOp {
        &mut self.entries[i * self.n + j]
    }

    pub fn apply(&self, v: &[DiffFunction], ctx: &JetContext) -> Result<Vec<DiffFunction>, JetError> {
        assert_eq!(v.len(), self.n, "vector length must match operator size");
        let mut out = vec![DiffFunction::zero(); self.n];
        for (i, slot) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *slot += self.get(i, j).apply(vj, ctx)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MatrixDiffOperator) -> MatrixDiffOperator {
        MatrixDiffOperator {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn left_mul(&self, f: &DiffFunction) -> MatrixDiffOperator {
        MatrixDiffOperator {
            n: self.n,
            entries: self.entries.iter().map(|a| a.left_mul(f)).collect(),
        }
    }

    pub fn neg(&self) -> MatrixDiffOperator {
        self.left_mul(&DiffFunction::int(-1))
    }

    pub fn compose(&self, other: &MatrixDiffOperator, ctx: &JetContext) -> Result<MatrixDiffOperator, JetError> {
        let mut out = MatrixDiffOperator::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = DiffOp::zero();
                for k in 0..self.n {
                    acc = acc.add(&self.get(i, k).compose(other.get(k, j), ctx)?);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Transposed matrix of entrywise formal adjoints.
    pub fn formal_adjoint(&self, ctx: &JetContext) -> Result<MatrixDiffOperator, JetError> {
        let mut out = MatrixDiffOperator::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).adjoint(ctx)?);
            }
        }
        Ok(out)
    }

    pub fn same(&self, other: &MatrixDiffOperator) -> Result<bool, JetError> {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.same(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for MatrixDiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" | "))?;
        }
        Ok(())
    }
}

/// Restricted Fréchet derivative: entry `(i, j)` is `Σ_κ ∂Fⁱ/∂rʲ_κ 𝒟ₓ^κ`.
pub fn frechet(f: &[DiffFunction]) -> Result<MatrixDiffOperator, JetError> {
    let n = f.len();
    let mut out = MatrixDiffOperator::zero(n);
    for (i, fi) in f.iter().enumerate() {
        let s = to_standard(fi)?;
        for a in s.base_atoms() {
            if let Atom::R(j, k) = a {
                if (j as usize) <= n {
                    out.entry_mut(i, j as usize - 1).add_term(diff_partial(&s, &a), 0, k);
                }
            }
        }
    }
    Ok(out)
}

/// Off-shell Fréchet derivative: entry `(i, j)` is `Σ ∂Fⁱ/∂rʲ_(a,b) D_t^a D_x^b`.
pub fn frechet_full(f: &[DiffFunction]) -> Result<MatrixDiffOperator, JetError> {
    let n = f.len();
    let mut out = MatrixDiffOperator::zero(n);
    for (i, fi) in f.iter().enumerate() {
        let s = to_standard(fi)?;
        for a in s.base_atoms() {
            let (j, ta, xb) = match a {
                Atom::R(j, k) => (j, 0, k),
                Atom::Mixed(j, ta, xb) => (j, ta, xb),
                _ => continue,
            };
            if (j as usize) <= n {
                out.entry_mut(i, j as usize - 1).add_term(diff_partial(&s, &a), ta, xb);
            }
        }
    }
    Ok(out)
}
