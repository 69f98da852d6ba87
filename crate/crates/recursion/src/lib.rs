//! Recursion operators of the drift flux system: Teshukov's operator, the
//! local families built from the Klein–Gordon tilde operators and from `𝒜`,
//! and the nonlocal operator `ℜ₄` with its potential.

use std::fmt;

use expr_kernel::{q, DiffFunction, KernelError, Q};
use jet_calculus::{op_a, to_modified, DiffOp, JetContext, JetError, MatrixDiffOperator};
use model::{ModelError, TildeOp, TildeWord};
use symmetry::{make_r_from_gamma, EvolutionaryField, SymmetryError};

mod nonlocal;
mod tables;

pub use nonlocal::{apply_r4, r4_determining_check, R4Config, R4Determining, R4Report, R4};
pub use tables::{
    r1_action_table, r2_action_table, r3_action_table, sample_closure, teshukov_action_table,
    teshukov_decomposition_check, ActionEntry, TestField,
};

/// Longest admitted tilde word, and largest `N` in `𝔓 = Σ_{κ≤N} Ω^κ𝒜^κ`.
pub const WORD_BUDGET: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecursionError {
    #[error("operator of length {len} exceeds the budget {cap}")]
    BudgetExceeded { len: usize, cap: usize },
    #[error("word {0} is not of the form Dy^i J^k or Dz^i J^k")]
    NotAdmitted(String),
    #[error("ℜ₄ is nonlocal; use apply_r4 with a solution sample")]
    Nonlocal,
    #[error("potential Y: centred Y_t disagrees with the defining flux by {discrepancy:e} (tolerance {tolerance:e})")]
    QuadratureInconsistent { discrepancy: f64, tolerance: f64 },
    #[error("bad operator spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Solution(#[from] solutions::SolutionError),
}

pub fn ctx() -> JetContext {
    JetContext::modified()
}

fn half_exp(sign: i64) -> DiffFunction {
    DiffFunction::exp_r(q(sign, 2), q(-sign, 2))
}

/// Which characteristic component `ℜ₁,𝔔` or `ℜ₂,𝔔` reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

#[derive(Clone, Debug)]
pub enum RecursionOperator {
    /// A matrix of `x`-differential operators.
    Local(MatrixDiffOperator),
    /// `ℜ₁,𝔔` or `ℜ₂,𝔔`: `η ↦ ℛ̌(𝔔(e^{(r¹−r²)/2}ηʲ/rʲₓ))`.
    Klein { slot: Slot, word: TildeWord },
    /// `ℜ₃,𝔓` with `𝔓 = Σ_κ p[κ]𝒜^κ`.
    Degenerate { p: Vec<DiffFunction> },
    Nonlocal(R4),
}

fn admitted(word: &TildeWord) -> Result<(), RecursionError> {
    if word.len() > WORD_BUDGET {
        return Err(RecursionError::BudgetExceeded { len: word.len(), cap: WORD_BUDGET });
    }
    let split = word.0.iter().position(|o| matches!(o, TildeOp::J(_))).unwrap_or(word.len());
    let (head, tail) = word.0.split_at(split);
    let ok_tail = tail.iter().all(|o| *o == TildeOp::J(Q::from_integer(0)));
    let ok_head = head.iter().all(|o| *o == TildeOp::Dy) || head.iter().all(|o| *o == TildeOp::Dz);
    if ok_tail && ok_head {
        Ok(())
    } else {
        Err(RecursionError::NotAdmitted(word.to_string()))
    }
}

/// Parses words such as `1`, `J`, `DyJ^2`, `Dz^2`.
pub fn parse_word(text: &str) -> Result<TildeWord, RecursionError> {
    let bad = || RecursionError::BadSpec(text.to_string());
    if text == "1" || text.is_empty() {
        return Ok(TildeWord::default());
    }
    let mut ops = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let (op, tail) = if let Some(t) = rest.strip_prefix("Dy") {
            (TildeOp::Dy, t)
        } else if let Some(t) = rest.strip_prefix("Dz") {
            (TildeOp::Dz, t)
        } else if let Some(t) = rest.strip_prefix('J') {
            (TildeOp::J(Q::from_integer(0)), t)
        } else {
            return Err(bad());
        };
        let (n, tail) = match tail.strip_prefix('^') {
            Some(t) => {
                let digits: String = t.chars().take_while(char::is_ascii_digit).collect();
                let n: usize = digits.parse().map_err(|_| bad())?;
                (n, &t[digits.len()..])
            }
            None => (1, tail),
        };
        ops.extend(std::iter::repeat(op).take(n));
        rest = tail;
    }
    Ok(TildeWord(ops))
}

/// `ℜ_T = 𝒟ₓ∘diag(1/r¹ₓ, 1/r²ₓ, 1/r³ₓ) + M`.
pub fn teshukov() -> Result<RecursionOperator, RecursionError> {
    let c = ctx();
    let rx = |i: u8| DiffFunction::r(i, 1);
    let inv = |i: u8| rx(i).pow(-1);
    let half = q(1, 2);
    let m: [[DiffFunction; 3]; 3] = [
        [
            ((rx(1) - rx(2)) * inv(1)).scale(half),
            ((rx(2) - rx(1)) * inv(2)).scale(half),
            DiffFunction::zero(),
        ],
        [
            ((rx(2) - rx(1)) * inv(1)).scale(half),
            ((rx(1) - rx(2)) * inv(2)).scale(half),
            DiffFunction::zero(),
        ],
        [(rx(3) - rx(1)) * inv(1), (rx(2) - rx(3)) * inv(2), (rx(1) - rx(2)) * inv(3)],
    ];
    let mut op = MatrixDiffOperator::zero(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut e = DiffOp::mul(to_modified(&m[i][j])?);
            if i == j {
                let d = DiffOp::dx(DiffFunction::one(), 1).compose(&DiffOp::mul(to_modified(&inv(i as u8 + 1))?), &c)?;
                e = e.add(&d);
            }
            op.set(i, j, e);
        }
    }
    Ok(RecursionOperator::Local(op))
}

/// `ℜ₁,𝔔` for an admitted word `𝔔`.
pub fn make_r1(word: TildeWord) -> Result<RecursionOperator, RecursionError> {
    admitted(&word)?;
    Ok(RecursionOperator::Klein { slot: Slot::First, word })
}

/// `ℜ₂,𝔔` for an admitted word `𝔔`.
pub fn make_r2(word: TildeWord) -> Result<RecursionOperator, RecursionError> {
    admitted(&word)?;
    Ok(RecursionOperator::Klein { slot: Slot::Second, word })
}

/// `ℜ₃,𝔓` with `𝔓 = Σ_κ p[κ]𝒜^κ`; coefficients are functions of the `ω^ι`.
pub fn make_r3(p: Vec<DiffFunction>) -> Result<RecursionOperator, RecursionError> {
    if p.len() > WORD_BUDGET + 1 {
        return Err(RecursionError::BudgetExceeded { len: p.len() - 1, cap: WORD_BUDGET });
    }
    let p = p.iter().map(to_modified).collect::<Result<Vec<_>, _>>()?;
    for c in &p {
        if let Some(a) = c.base_atoms().into_iter().find(|a| a.omega_index().is_none()) {
            return Err(RecursionError::BadSpec(format!("coefficient depends on {a}")));
        }
    }
    Ok(RecursionOperator::Degenerate { p })
}

/// `𝒜 = e^{r²−r¹}𝒟ₓ`, in modified coordinates.
pub fn op_script_a(e: &DiffFunction) -> Result<DiffFunction, RecursionError> {
    Ok(to_modified(&op_a(e, &ctx()))?)
}

/// `𝔓f`.
pub fn apply_p(p: &[DiffFunction], f: &DiffFunction) -> Result<DiffFunction, RecursionError> {
    let mut out = DiffFunction::zero();
    let mut power = to_modified(f)?;
    for (k, c) in p.iter().enumerate() {
        if k > 0 {
            power = op_script_a(&power)?;
        }
        out += c * &power;
    }
    Ok(out)
}

impl RecursionOperator {
    pub fn apply(&self, eta: &EvolutionaryField) -> Result<EvolutionaryField, RecursionError> {
        let c = ctx();
        match self {
            RecursionOperator::Local(m) => {
                let v = m.apply(&eta.eta, &c)?;
                Ok(EvolutionaryField::new([v[0].clone(), v[1].clone(), v[2].clone()])?)
            }
            RecursionOperator::Klein { slot, word } => {
                let (comp, i) = match slot {
                    Slot::First => (&eta.eta[0], 1),
                    Slot::Second => (&eta.eta[1], 2),
                };
                let seed = half_exp(1) * comp * DiffFunction::r(i, 1).pow(-1);
                let g = word.apply(&to_modified(&seed)?, &c)?;
                Ok(make_r_from_gamma(&g)?)
            }
            RecursionOperator::Degenerate { p } => {
                let omega1 = DiffFunction::omega(1);
                let inner = DiffFunction::zero() - &eta.eta[0] + &eta.eta[1] + op_script_a(&(&eta.eta[2] * &omega1.pow(-1)))?;
                Ok(EvolutionaryField::new([DiffFunction::zero(), DiffFunction::zero(), apply_p(p, &inner)?])?)
            }
            RecursionOperator::Nonlocal(_) => Err(RecursionError::Nonlocal),
        }
    }

    /// Parses `T`, `R1:<word>`, `R2:<word>`, `R3:<Ω⁰>;<Ω¹>;…` and
    /// `R4` / `R4:printed`.
    pub fn parse(text: &str) -> Result<RecursionOperator, RecursionError> {
        let (head, arg) = text.split_once(':').unwrap_or((text, ""));
        match head {
            "T" => teshukov(),
            "R1" => make_r1(parse_word(arg)?),
            "R2" => make_r2(parse_word(arg)?),
            "R3" => {
                let arg = if arg.is_empty() { "1" } else { arg };
                let p = arg
                    .split(';')
                    .map(|s| expr_kernel::parse(s.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                make_r3(p)
            }
            "R4" => match arg {
                "" | "resolved" => Ok(RecursionOperator::Nonlocal(R4::resolved())),
                "printed" => Ok(RecursionOperator::Nonlocal(R4::printed())),
                _ => Err(RecursionError::BadSpec(text.to_string())),
            },
            _ => Err(RecursionError::BadSpec(text.to_string())),
        }
    }
}

impl fmt::Display for RecursionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecursionOperator::Local(_) => write!(f, "R_T"),
            RecursionOperator::Klein { slot: Slot::First, word } => write!(f, "R1[{word}]"),
            RecursionOperator::Klein { slot: Slot::Second, word } => write!(f, "R2[{word}]"),
            RecursionOperator::Degenerate { p } => {
                write!(f, "R3[")?;
                for (k, c) in p.iter().enumerate() {
                    if k > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            RecursionOperator::Nonlocal(r) => write!(f, "{r}"),
        }
    }
}
