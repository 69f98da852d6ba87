//! The three families of cosymmetries, conserved currents and characteristics.

use std::fmt;

use expr_kernel::{diff_partial, q, Atom, DiffFunction, Q};
use jet_calculus::{ahat, e_operator, velocity};
use model::{q_tilde, tilde_dy, tilde_dz, TildeOp, TildeWord};
use num_traits::{One, Zero};
use symmetry::{GammaKind, GammaSpec};

use crate::{ctx, is_conserved_current, ConservationError, ConservedCurrent, Cosymmetry};

/// Multiplier turning the displayed family-3 characteristic into the
/// characteristic of the family-3 current with the same operator.
pub const FAMILY3_PAIRING: i64 = -2;

fn e12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 1), q(-1, 1))
}

fn half12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 2), q(-1, 2))
}

/// A linear combination of tilde words, acting on `q̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperator(pub Vec<(Q, TildeWord)>);

impl QOperator {
    pub fn word(w: TildeWord) -> QOperator {
        QOperator(vec![(Q::one(), w)])
    }

    /// Operators of the current family: `𝒥̃^κ`, `(𝒥̃+ι/2)^κ𝒟̃_y^ι`, `(𝒥̃−ι/2)^κ𝒟̃_z^ι`.
    pub fn current_form(spec: GammaSpec) -> QOperator {
        let half = q(spec.iota as i64, 2);
        QOperator::word(match spec.kind {
            GammaKind::JPower => TildeWord::power_then(Q::zero(), spec.kappa, None, 0),
            GammaKind::DyThenJ => TildeWord::power_then(half, spec.kappa, Some(TildeOp::Dy), spec.iota),
            GammaKind::DzThenJ => TildeWord::power_then(-half, spec.kappa, Some(TildeOp::Dz), spec.iota),
        })
    }

    /// Operators of the cosymmetry family: `𝒥̃^κ`, `𝒥̃^κ𝒟̃_y^ι`, `𝒥̃^κ𝒟̃_z^ι`.
    pub fn cosymmetry_form(spec: GammaSpec) -> QOperator {
        let op = match spec.kind {
            GammaKind::JPower => None,
            GammaKind::DyThenJ => Some(TildeOp::Dy),
            GammaKind::DzThenJ => Some(TildeOp::Dz),
        };
        QOperator::word(TildeWord::power_then(Q::zero(), spec.kappa, op, spec.iota))
    }

    /// `Σ cᵢ · wordᵢ`.
    pub fn combination(parts: Vec<(i64, Vec<TildeOp>)>) -> QOperator {
        QOperator(parts.into_iter().map(|(c, w)| (Q::from_integer(c as i128), TildeWord(w))).collect())
    }

    /// `𝔔̃ q̃`.
    pub fn apply_to_q(&self) -> Result<DiffFunction, ConservationError> {
        let c = ctx();
        let base = q_tilde();
        let mut out = DiffFunction::zero();
        for (k, w) in &self.0 {
            out += w.apply(&base, &c)?.scale(*k);
        }
        Ok(out)
    }
}

impl fmt::Display for QOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, w)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{c}*{w}")?;
            }
        }
        Ok(())
    }
}

fn verified(cur: ConservedCurrent, what: &str) -> Result<ConservedCurrent, ConservationError> {
    if is_conserved_current(&cur)?.pass {
        Ok(cur)
    } else {
        Err(ConservationError::ConstructionFailed(what.to_string()))
    }
}

/// `(e^{r¹−r²}Ω, (r¹+r²)e^{r¹−r²}Ω)`.
pub fn make_current_family1(omega: &DiffFunction) -> Result<ConservedCurrent, ConservationError> {
    let rho = e12() * omega;
    let sigma = velocity(3) * &rho;
    verified(ConservedCurrent::new(rho, sigma)?, "family 1 current")
}

/// `e^{(r¹−r²)/2}(2Φ_{r¹}+Φ, 2V¹Φ_{r¹}+V²Φ)`.
pub fn make_current_family2(phi: &DiffFunction) -> Result<ConservedCurrent, ConservationError> {
    let p1 = diff_partial(phi, &Atom::r(1, 0));
    let h = half12();
    let rho = &h * &(p1.scale_int(2) + phi);
    let sigma = &h * &((velocity(1) * &p1).scale_int(2) + velocity(2) * phi);
    verified(ConservedCurrent::new(rho, sigma)?, "family 2 current")
}

/// `(r²ₓρ̃ + r¹ₓσ̃, V²r²ₓρ̃ + V¹r¹ₓσ̃)` with `ρ̃ = −q̃𝒟̃_z𝔔̃q̃`, `σ̃ = (𝒟̃_yq̃)𝔔̃q̃`.
pub fn make_current_family3(op: &QOperator) -> Result<ConservedCurrent, ConservationError> {
    let c = ctx();
    let qt = q_tilde();
    let qq = op.apply_to_q()?;
    let rt = -(&qt * &tilde_dz(&qq, &c)?);
    let st = tilde_dy(&qt, &c)? * &qq;
    let a = DiffFunction::r(2, 1) * &rt;
    let b = DiffFunction::r(1, 1) * &st;
    let sigma = velocity(2) * &a + velocity(1) * &b;
    verified(ConservedCurrent::new(a + b, sigma)?, &format!("family 3 current for {op}"))
}

/// `Σ_κ (−𝒜̂)^κ ∂_{ω^κ}Ω`.
pub fn e_prime(omega: &DiffFunction) -> DiffFunction {
    let top = omega.base_atoms().iter().filter_map(Atom::omega_index).max();
    let mut out = DiffFunction::zero();
    for k in 0..=top.unwrap_or(0) {
        let mut d = diff_partial(omega, &Atom::omega(k));
        for _ in 0..k {
            d = -ahat(&d);
        }
        out += d;
    }
    out
}

/// `e^{r¹−r²}(−𝖤Ω, 𝖤Ω, Σ_κ(−𝒜̂)^κΩ_{ω^κ})`.
pub fn make_characteristic_family1(omega: &DiffFunction) -> Result<Cosymmetry, ConservationError> {
    let e = e12();
    let eo = e_operator(omega);
    Cosymmetry::new([-(&e * &eo), &e * &eo, &e * &e_prime(omega)])
}

/// `e^{(r¹−r²)/2}(2Φ_{r¹r¹}+2Φ_{r¹}+½Φ, Φ_{r²}−Φ_{r¹}−Φ, 0)`.
pub fn make_characteristic_family2(phi: &DiffFunction) -> Result<Cosymmetry, ConservationError> {
    let r1 = Atom::r(1, 0);
    let p1 = diff_partial(phi, &r1);
    let p11 = diff_partial(&p1, &r1);
    let p2 = diff_partial(phi, &Atom::r(2, 0));
    let h = half12();
    Cosymmetry::new([
        &h * &(p11.scale_int(2) + p1.scale_int(2) + phi.scale(q(1, 2))),
        &h * &(p2 - &p1 - phi),
        DiffFunction::zero(),
    ])
}

/// `e^{(r¹−r²)/2}(−𝒟̃_y𝔔̃q̃, 𝔔̃q̃, 0)`, without the pairing multiplier.
pub fn make_characteristic_family3(op: &QOperator) -> Result<Cosymmetry, ConservationError> {
    let qq = op.apply_to_q()?;
    let h = half12();
    Cosymmetry::new([-(&h * &tilde_dy(&qq, &ctx())?), &h * &qq, DiffFunction::zero()])
}

/// `e^{r¹−r²}(Ω, −Ω, (𝒜̂Ω)/ω¹)`.
pub fn make_cosymmetry_family1(omega: &DiffFunction) -> Result<Cosymmetry, ConservationError> {
    let e = e12();
    Cosymmetry::new([&e * omega, -(&e * omega), &e * &(ahat(omega) * DiffFunction::omega(1).pow(-1))])
}

/// `e^{(r¹−r²)/2}(−2Φ_{r¹}, Φ, 0)`.
pub fn make_cosymmetry_family2(phi: &DiffFunction) -> Result<Cosymmetry, ConservationError> {
    let h = half12();
    let p1 = diff_partial(phi, &Atom::r(1, 0));
    Cosymmetry::new([-(&h * &p1.scale_int(2)), &h * phi, DiffFunction::zero()])
}

/// Same shape as the family-3 characteristic, over the wider operator set.
pub fn make_cosymmetry_family3(op: &QOperator) -> Result<Cosymmetry, ConservationError> {
    make_characteristic_family3(op)
}
