//! Total derivatives and the operators built from them on the jet space of
//! the diagonal drift flux system `rⁱ_t + Vⁱ rⁱ_x = 0`.

use std::collections::BTreeMap;

use expr_kernel::{is_zero, Atom, DiffFunction, KernelError, Verdict};

pub mod euler;
pub mod image;
pub mod operator;
pub mod prolong;
pub mod total;

pub use euler::{euler_full, euler_operator, euler_x_layers};
pub use image::{ahat, e_operator, in_image_of_ahat, ord, Family};
pub use operator::{frechet, frechet_full, DiffOp, MatrixDiffOperator};
pub use prolong::prolong;
pub use total::{
    dx_pow, full_dt, full_dx, on_shell, op_a, op_b, system_lhs, to_modified, to_standard, total_dt,
    total_dx, velocity,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("restricted t-derivative requested in off-shell mode")]
    OffShellMode,
    #[error("atom {atom} exceeds the tracked order {max}")]
    OrderExceeded { atom: String, max: u32 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Coordinates in which results are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `(t, x, rⁱ_κ)`.
    Standard,
    /// `(t, x, r¹_κ, r²_κ, ω^κ)`: `r³` enters only through `ω⁰ = r³`.
    Modified,
    /// Mixed jets `rⁱ_(a,b)`; only full derivatives are available.
    OffShell,
}

/// Derivatives of a nonlocal variable.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlocalRule {
    pub dx: DiffFunction,
    pub dt: DiffFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetContext {
    pub mode: Mode,
    pub max_order: Option<u32>,
    pub nonlocal: BTreeMap<u32, NonlocalRule>,
}

impl JetContext {
    pub fn new(mode: Mode) -> JetContext {
        JetContext {
            mode,
            max_order: None,
            nonlocal: BTreeMap::new(),
        }
    }

    pub fn standard() -> JetContext {
        JetContext::new(Mode::Standard)
    }

    pub fn modified() -> JetContext {
        JetContext::new(Mode::Modified)
    }

    pub fn off_shell() -> JetContext {
        JetContext::new(Mode::OffShell)
    }

    pub fn with_max_order(mut self, max: u32) -> JetContext {
        self.max_order = Some(max);
        self
    }

    /// Registers `Y_k` with `𝒟ₓY_k = dx`, `𝒟ₜY_k = dt`.
    pub fn with_nonlocal(mut self, k: u32, dx: DiffFunction, dt: DiffFunction) -> JetContext {
        self.nonlocal.insert(k, NonlocalRule { dx, dt });
        self
    }

    /// Fails if `e` contains a jet variable beyond the tracked order.
    pub fn check_order(&self, e: &DiffFunction) -> Result<(), JetError> {
        let Some(max) = self.max_order else { return Ok(()) };
        for a in e.base_atoms() {
            let k = match a {
                Atom::R(_, k) | Atom::Omega(k) => k,
                Atom::Mixed(_, a, b) => a + b,
                _ => 0,
            };
            if k > max {
                return Err(JetError::OrderExceeded { atom: a.to_string(), max });
            }
        }
        Ok(())
    }
}

/// Zero test after rewriting `r³_κ` (κ ≥ 1) through the modified coordinates,
/// which makes representations in different coordinate systems comparable.
pub fn jet_is_zero(e: &DiffFunction) -> Result<bool, JetError> {
    let m = to_modified(e)?;
    Ok(is_zero(&m, 0)?.holds())
}

/// Verdict of `a = b` modulo the coordinate identities.
pub fn jet_equals(a: &DiffFunction, b: &DiffFunction) -> Result<Verdict, JetError> {
    let m = to_modified(&(a - b))?;
    Ok(is_zero(&m, 0)?)
}

/// Outcome of checking that a list of residuals vanishes.
#[derive(Clone, Debug)]
pub struct Report {
    pub pass: bool,
    /// Set when some residual was only shown to vanish numerically.
    pub probabilistic: bool,
    pub residuals: Vec<DiffFunction>,
}

impl Report {
    /// Rewrites the residuals in modified coordinates and zero-tests each.
    pub fn from_residuals(residuals: Vec<DiffFunction>) -> Result<Report, JetError> {
        let mut pass = true;
        let mut probabilistic = false;
        let mut out = Vec::with_capacity(residuals.len());
        for r in residuals {
            let m = to_modified(&r)?;
            match is_zero(&m, 0)? {
                Verdict::Equal => {}
                Verdict::ProbablyEqual => probabilistic = true,
                Verdict::NotEqual => pass = false,
            }
            out.push(m);
        }
        Ok(Report {
            pass,
            probabilistic,
            residuals: out,
        })
    }
}
