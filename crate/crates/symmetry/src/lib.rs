//! Generalized symmetries of the drift flux system in evolutionary form.

use std::fmt;

use expr_kernel::{diff_partial, q, Atom, DiffFunction, Q};
use jet_calculus::{prolong, to_modified, total_dt, total_dx, velocity, JetContext, JetError, Report};
use model::{q_tilde, tilde_dy, tilde_dz, ModelError, TildeOp, TildeWord};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("expansion of order {order} exceeds the cap {cap}")]
    BudgetExceeded { order: u32, cap: u32 },
    #[error("bad family specification: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Default cap on `κ + ι` when expanding `Γ`.
pub const DEFAULT_ORDER_CAP: u32 = 5;

pub fn ctx() -> JetContext {
    JetContext::modified()
}

/// Characteristic `(η¹, η², η³)` of an evolutionary vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionaryField {
    pub eta: [DiffFunction; 3],
}

impl EvolutionaryField {
    pub fn new(eta: [DiffFunction; 3]) -> Result<EvolutionaryField, SymmetryError> {
        Ok(EvolutionaryField {
            eta: [to_modified(&eta[0])?, to_modified(&eta[1])?, to_modified(&eta[2])?],
        })
    }

    pub fn zero() -> EvolutionaryField {
        EvolutionaryField {
            eta: Default::default(),
        }
    }

    pub fn scale(&self, c: Q) -> EvolutionaryField {
        EvolutionaryField {
            eta: self.eta.clone().map(|e| e.scale(c)),
        }
    }

    pub fn add(&self, other: &EvolutionaryField) -> EvolutionaryField {
        EvolutionaryField {
            eta: std::array::from_fn(|i| &self.eta[i] + &other.eta[i]),
        }
    }

    pub fn sub(&self, other: &EvolutionaryField) -> EvolutionaryField {
        self.add(&other.scale(Q::from_integer(-1)))
    }

    /// Componentwise equality modulo coordinate identities.
    pub fn same(&self, other: &EvolutionaryField) -> Result<bool, SymmetryError> {
        Ok(Report::from_residuals(self.sub(other).eta.to_vec())?.pass)
    }

    pub fn is_zero(&self) -> Result<bool, SymmetryError> {
        Ok(Report::from_residuals(self.eta.to_vec())?.pass)
    }
}

impl fmt::Display for EvolutionaryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.eta[0], self.eta[1], self.eta[2])
    }
}

/// Residuals of `𝒟ₜηⁱ + Vⁱ𝒟ₓηⁱ + rⁱₓ(η¹+η²) = 0`.
pub fn is_symmetry(field: &EvolutionaryField) -> Result<Report, SymmetryError> {
    let c = ctx();
    let sum = &field.eta[0] + &field.eta[1];
    let mut res = Vec::with_capacity(3);
    for i in 0..3u8 {
        let e = &field.eta[i as usize];
        res.push(total_dt(e, &c)? + velocity(i + 1) * total_dx(e, &c) + DiffFunction::r(i + 1, 1) * &sum);
    }
    Ok(Report::from_residuals(res)?)
}

/// Checks many fields in parallel.
pub fn check_all(fields: &[EvolutionaryField]) -> Vec<Result<Report, SymmetryError>> {
    fields.par_iter().map(is_symmetry).collect()
}

fn half_exp(sign: i64) -> DiffFunction {
    DiffFunction::exp_r(q(sign, 2), q(-sign, 2))
}

/// `𝒲̌(Ω) = Ω∂_{r³}`.
pub fn make_w(omega: &DiffFunction) -> Result<EvolutionaryField, SymmetryError> {
    EvolutionaryField::new([DiffFunction::zero(), DiffFunction::zero(), omega.clone()])
}

/// `𝒫̌(Φ) = e^{(r²−r¹)/2}((Φ+2Φ_{r¹})r¹ₓ, (Φ−2Φ_{r²})r²ₓ, 2Φr³ₓ)`.
pub fn make_p(phi: &DiffFunction) -> Result<EvolutionaryField, SymmetryError> {
    let e = half_exp(-1);
    let p1 = diff_partial(phi, &Atom::r(1, 0));
    let p2 = diff_partial(phi, &Atom::r(2, 0));
    EvolutionaryField::new([
        &e * &((phi + &p1.scale_int(2)) * DiffFunction::r(1, 1)),
        &e * &((phi - &p2.scale_int(2)) * DiffFunction::r(2, 1)),
        &e * &(phi.scale_int(2) * DiffFunction::r(3, 1)),
    ])
}

/// `𝒟̌ = ((x−Vⁱt) rⁱₓ)ᵢ`.
pub fn make_d() -> Result<EvolutionaryField, SymmetryError> {
    let comp = |i: u8| (DiffFunction::x() - velocity(i) * DiffFunction::t()) * DiffFunction::r(i, 1);
    EvolutionaryField::new([comp(1), comp(2), comp(3)])
}

/// `𝒢̌₁ = (t r¹ₓ − 1, t r²ₓ, t r³ₓ)`.
pub fn make_g1() -> Result<EvolutionaryField, SymmetryError> {
    let t = DiffFunction::t();
    EvolutionaryField::new([
        &t * &DiffFunction::r(1, 1) - DiffFunction::one(),
        &t * &DiffFunction::r(2, 1),
        &t * &DiffFunction::r(3, 1),
    ])
}

/// `𝒢̌₂ = (1, −1, 0)`.
pub fn make_g2() -> EvolutionaryField {
    EvolutionaryField {
        eta: [DiffFunction::one(), DiffFunction::int(-1), DiffFunction::zero()],
    }
}

/// Shapes of `Γ`: `𝒥̃^κ q̃`, `𝒟̃_y^ι 𝒥̃^κ q̃`, `𝒟̃_z^ι 𝒥̃^κ q̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaKind {
    JPower,
    DyThenJ,
    DzThenJ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaSpec {
    pub kind: GammaKind,
    pub kappa: u32,
    pub iota: u32,
}

impl GammaSpec {
    pub fn j_power(kappa: u32) -> GammaSpec {
        GammaSpec {
            kind: GammaKind::JPower,
            kappa,
            iota: 0,
        }
    }

    pub fn dy(iota: u32, kappa: u32) -> GammaSpec {
        GammaSpec {
            kind: GammaKind::DyThenJ,
            kappa,
            iota,
        }
    }

    pub fn dz(iota: u32, kappa: u32) -> GammaSpec {
        GammaSpec {
            kind: GammaKind::DzThenJ,
            kappa,
            iota,
        }
    }

    pub fn order(&self) -> u32 {
        self.kappa + self.iota
    }

    /// Every spec with `κ + ι ≤ max`, `ι ≥ 1` for the derivative shapes.
    pub fn all_up_to(max: u32) -> Vec<GammaSpec> {
        let mut out = Vec::new();
        for kappa in 0..=max {
            out.push(GammaSpec::j_power(kappa));
            for iota in 1..=(max - kappa) {
                out.push(GammaSpec::dy(iota, kappa));
                out.push(GammaSpec::dz(iota, kappa));
            }
        }
        out
    }

    pub fn word(&self) -> TildeWord {
        let mut ops = match self.kind {
            GammaKind::JPower => vec![],
            GammaKind::DyThenJ => vec![TildeOp::Dy; self.iota as usize],
            GammaKind::DzThenJ => vec![TildeOp::Dz; self.iota as usize],
        };
        ops.extend(std::iter::repeat(TildeOp::J(Q::from_integer(0))).take(self.kappa as usize));
        TildeWord(ops)
    }

    /// `Γ` expanded in jet coordinates.
    pub fn gamma(&self, cap: u32) -> Result<DiffFunction, SymmetryError> {
        if self.order() > cap {
            return Err(SymmetryError::BudgetExceeded {
                order: self.order(),
                cap,
            });
        }
        Ok(self.word().apply(&q_tilde(), &ctx())?)
    }

    /// Parses `J^k`, `Dy^i`, `Dz^i`, `Dy^iJ^k` or `Dz^iJ^k`.
    pub fn parse(text: &str) -> Result<GammaSpec, SymmetryError> {
        let bad = || SymmetryError::BadSpec(text.to_string());
        let power = |s: &str, head: &str| -> Result<Option<(u32, usize)>, SymmetryError> {
            let Some(rest) = s.strip_prefix(head) else { return Ok(None) };
            let rest = rest.strip_prefix('^').ok_or_else(bad)?;
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            let n = digits.parse().map_err(|_| bad())?;
            Ok(Some((n, head.len() + 1 + digits.len())))
        };
        let (kind, iota, used) = if let Some((n, used)) = power(text, "Dy")? {
            (GammaKind::DyThenJ, n, used)
        } else if let Some((n, used)) = power(text, "Dz")? {
            (GammaKind::DzThenJ, n, used)
        } else {
            (GammaKind::JPower, 0, 0)
        };
        let rest = &text[used..];
        let kappa = if rest.is_empty() {
            0
        } else {
            match power(rest, "J")? {
                Some((k, n)) if n == rest.len() => k,
                _ => return Err(bad()),
            }
        };
        if kind != GammaKind::JPower && iota == 0 {
            return Err(bad());
        }
        Ok(GammaSpec { kind, kappa, iota })
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GammaKind::JPower => write!(f, "J^{}", self.kappa),
            GammaKind::DyThenJ => write!(f, "Dy^{}J^{}", self.iota, self.kappa),
            GammaKind::DzThenJ => write!(f, "Dz^{}J^{}", self.iota, self.kappa),
        }
    }
}

/// `ℛ̌(Γ) = e^{(r²−r¹)/2}((𝒟̃_yΓ+Γ)r¹ₓ, (𝒟̃_zΓ+Γ)r²ₓ, 2Γr³ₓ)`.
pub fn make_r_from_gamma(gamma: &DiffFunction) -> Result<EvolutionaryField, SymmetryError> {
    let c = ctx();
    let e = half_exp(-1);
    EvolutionaryField::new([
        &e * &((tilde_dy(gamma, &c)? + gamma) * DiffFunction::r(1, 1)),
        &e * &((tilde_dz(gamma, &c)? + gamma) * DiffFunction::r(2, 1)),
        &e * &(gamma.scale_int(2) * DiffFunction::r(3, 1)),
    ])
}

pub fn make_r(spec: GammaSpec) -> Result<EvolutionaryField, SymmetryError> {
    make_r_from_gamma(&spec.gamma(DEFAULT_ORDER_CAP)?)
}

/// `[η, η'] = pr η(η') − pr η'(η)`, computed on-shell.
pub fn lie_bracket(a: &EvolutionaryField, b: &EvolutionaryField) -> Result<EvolutionaryField, SymmetryError> {
    let c = ctx();
    let eta: [DiffFunction; 3] =
        std::array::from_fn(|i| prolong(&a.eta, &b.eta[i], &c) - prolong(&b.eta, &a.eta[i], &c));
    EvolutionaryField::new(eta)
}

/// `Σ_ι (𝒜̂^ι Ω¹) Ω²_{ω^ι} − (𝒜̂^ι Ω²) Ω¹_{ω^ι}`: the bracket inside `𝓘²`.
pub fn omega_bracket(o1: &DiffFunction, o2: &DiffFunction) -> DiffFunction {
    let top = o1
        .base_atoms()
        .iter()
        .chain(o2.base_atoms().iter())
        .filter_map(Atom::omega_index)
        .max();
    let mut out = DiffFunction::zero();
    let (mut a1, mut a2) = (o1.clone(), o2.clone());
    for iota in 0..=top.unwrap_or(0) {
        let w = Atom::omega(iota);
        out += &a1 * &diff_partial(o2, &w) - &a2 * &diff_partial(o1, &w);
        a1 = jet_calculus::ahat(&a1);
        a2 = jet_calculus::ahat(&a2);
    }
    out
}

/// Membership in the ideals `𝓘¹ = {𝒫̌(Φ)}` and `𝓘² = {𝒲̌(Ω)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    InI1,
    InI2,
    InIntersection,
    Outside,
}

fn is_omega_function(e: &DiffFunction) -> bool {
    e.terms().all(|(m, _)| m.exp().is_empty())
        && e.base_atoms().iter().all(|a| a.omega_index().is_some())
}

fn potential_of_p(field: &EvolutionaryField) -> Result<Option<DiffFunction>, SymmetryError> {
    let phi = to_modified(&(&field.eta[2] * &half_exp(-1) * DiffFunction::omega(1).pow(-1)).scale(q(1, 2)))?;
    let plain = phi
        .base_atoms()
        .iter()
        .all(|a| matches!(a, Atom::R(1, 0) | Atom::R(2, 0)));
    if !plain {
        return Ok(None);
    }
    let kg = diff_partial(&diff_partial(&phi, &Atom::r(1, 0)), &Atom::r(2, 0)) + phi.scale(q(1, 4));
    if !Report::from_residuals(vec![kg])?.pass {
        return Ok(None);
    }
    Ok(make_p(&phi)?.same(field)?.then_some(phi))
}

pub fn classify(field: &EvolutionaryField) -> Result<Classification, SymmetryError> {
    let in_i2 = field.eta[0].is_zero() && field.eta[1].is_zero() && is_omega_function(&field.eta[2]);
    let in_i1 = potential_of_p(field)?.is_some();
    Ok(match (in_i1, in_i2) {
        (true, true) => Classification::InIntersection,
        (true, false) => Classification::InI1,
        (false, true) => Classification::InI2,
        (false, false) => Classification::Outside,
    })
}

/// Named member of one of the families.
#[derive(Clone, Debug)]
pub struct NamedField {
    pub name: String,
    pub field: EvolutionaryField,
}

/// The sample set used by the acceptance suite: every family, Lie-point
/// fields included, with `ℛ̌` up to the given `κ + ι`.
pub fn standard_sample(max_gamma_order: u32) -> Result<Vec<NamedField>, SymmetryError> {
    let w = DiffFunction::omega;
    let r = |i| DiffFunction::r(i, 0);
    let omega_sym = expr_kernel::FunctionSymbol::free("Omega", 2);
    let phi_sym = expr_kernel::FunctionSymbol::klein_gordon("Phi", q(-1, 4));
    let omegas: Vec<(String, DiffFunction)> = vec![
        ("1".into(), DiffFunction::one()),
        ("omega0".into(), w(0)),
        ("omega0^2".into(), w(0) * w(0)),
        ("omega1".into(), w(1)),
        ("omega0*omega1".into(), w(0) * w(1)),
        ("Omega(omega0,omega1)".into(), DiffFunction::apply(&omega_sym, &[0, 0], vec![w(0), w(1)])),
    ];
    let phis: Vec<(String, DiffFunction)> = vec![
        ("exp((r1-r2)/2)".into(), half_exp(1)),
        ("exp((r2-r1)/2)".into(), half_exp(-1)),
        ("(r1+r2)exp((r1-r2)/2)".into(), (r(1) + r(2)) * half_exp(1)),
        ("exp(r1-r2/4)".into(), DiffFunction::exp_r(q(1, 1), q(-1, 4))),
        ("exp(2r1-r2/8)".into(), DiffFunction::exp_r(q(2, 1), q(-1, 8))),
        ("Phi(r1,r2)".into(), DiffFunction::apply(&phi_sym, &[0, 0], vec![r(1), r(2)])),
    ];
    let mut out = Vec::new();
    for (n, o) in omegas {
        out.push(NamedField {
            name: format!("W({n})"),
            field: make_w(&o)?,
        });
    }
    for (n, p) in phis {
        out.push(NamedField {
            name: format!("P({n})"),
            field: make_p(&p)?,
        });
    }
    out.push(NamedField { name: "D".into(), field: make_d()? });
    out.push(NamedField { name: "G1".into(), field: make_g1()? });
    out.push(NamedField { name: "G2".into(), field: make_g2() });
    for spec in GammaSpec::all_up_to(max_gamma_order) {
        out.push(NamedField {
            name: format!("R({spec})"),
            field: make_r(spec)?,
        });
    }
    Ok(out)
}
