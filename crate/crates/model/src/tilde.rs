//! Pullbacks of the Klein–Gordon side total derivatives.

use std::fmt;

use expr_kernel::{q, DiffFunction, Q};
use jet_calculus::{total_dt, total_dx, velocity, JetContext};

use crate::ModelError;

fn pulled(e: &DiffFunction, i: u8, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
    let other = 3 - i;
    let inner = total_dt(e, ctx)? + velocity(other) * total_dx(e, ctx);
    Ok(-(DiffFunction::r(i, 1).pow(-1) * inner))
}

/// `𝒟̃_y = −(1/r¹ₓ)(𝒟ₜ + V²𝒟ₓ)`.
pub fn tilde_dy(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
    pulled(e, 1, ctx)
}

/// `𝒟̃_z = −(1/r²ₓ)(𝒟ₜ + V¹𝒟ₓ)`.
pub fn tilde_dz(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
    pulled(e, 2, ctx)
}

/// `𝒥̃ = (r¹/2)𝒟̃_y + (r²/2)𝒟̃_z`.
pub fn tilde_j(e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
    let half = q(1, 2);
    Ok(DiffFunction::r(1, 0).scale(half) * tilde_dy(e, ctx)? + DiffFunction::r(2, 0).scale(half) * tilde_dz(e, ctx)?)
}

/// `q̃ = e^{(r¹−r²)/2}(x − (r¹+r²+1)t)`.
pub fn q_tilde() -> DiffFunction {
    DiffFunction::exp_r(q(1, 2), q(-1, 2)) * (DiffFunction::x() - velocity(1) * DiffFunction::t())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeOp {
    Dy,
    Dz,
    /// `𝒥̃ + c`.
    J(Q),
}

impl TildeOp {
    pub fn apply(self, e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
        match self {
            TildeOp::Dy => tilde_dy(e, ctx),
            TildeOp::Dz => tilde_dz(e, ctx),
            TildeOp::J(c) => Ok(tilde_j(e, ctx)? + e.scale(c)),
        }
    }
}

/// A product of tilde operators, the leftmost acting last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TildeWord(pub Vec<TildeOp>);

impl TildeWord {
    /// `(𝒥̃ + shift)^κ ∘ op^ι`.
    pub fn power_then(shift: Q, kappa: u32, op: Option<TildeOp>, iota: u32) -> TildeWord {
        let mut w = vec![TildeOp::J(shift); kappa as usize];
        if let Some(op) = op {
            w.extend(std::iter::repeat(op).take(iota as usize));
        }
        TildeWord(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, e: &DiffFunction, ctx: &JetContext) -> Result<DiffFunction, ModelError> {
        let mut v = e.clone();
        for op in self.0.iter().rev() {
            v = op.apply(&v, ctx)?;
        }
        Ok(v)
    }
}

impl fmt::Display for TildeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for op in &self.0 {
            match op {
                TildeOp::Dy => write!(f, "Dy")?,
                TildeOp::Dz => write!(f, "Dz")?,
                TildeOp::J(c) if *c == Q::from_integer(0) => write!(f, "J")?,
                TildeOp::J(c) => write!(f, "(J+{c})")?,
            }
        }
        Ok(())
    }
}
