//! The one-parameter family of Hamiltonian operators `ℌ_Θ` of the drift flux
//! system, their Noether property, Casimirs, metric geometry and the bracket
//! they induce on cosymmetries.

use std::fmt;

use conservation::{e_prime, ConservationError, Cosymmetry};
use expr_kernel::{diff_partial, q, Atom, DiffFunction, FunctionSymbol, KernelError};
use jet_calculus::{
    ahat, euler_operator, frechet, to_modified, DiffOp, JetContext, JetError, MatrixDiffOperator, Report,
};
use rayon::prelude::*;
use symmetry::{is_symmetry, lie_bracket, make_w, EvolutionaryField, SymmetryError};

mod density;
mod geometry;

pub use density::{hamiltonian_density, hamiltonian_form_check, xi_condition, FormReport};
pub use geometry::{
    compatibility_check, connection_matches, covariant_compatibility, is_flat, metric_of, nijenhuis,
    riemann_curvature, Matrix3, Metric, Tensor3, Tensor4,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HamiltonianError {
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("auxiliary condition on Ξ fails (residual {residual}); Hamilton equations hold: {hamilton_pass}")]
    ConstraintViolated { residual: String, hamilton_pass: bool },
    #[error("operator is not of hydrodynamic type: {0}")]
    NotHydrodynamic(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Conservation(#[from] ConservationError),
}

pub fn ctx() -> JetContext {
    JetContext::modified()
}

/// A free univariate symbol applied to `ω⁰`, such as `Θ(ω⁰)`.
pub fn theta_symbol(name: &str) -> DiffFunction {
    DiffFunction::apply(&FunctionSymbol::free(name, 1), &[0], vec![DiffFunction::omega(0)])
}

/// `∂_{ω⁰}`.
pub fn d_omega0(e: &DiffFunction) -> DiffFunction {
    diff_partial(e, &Atom::omega(0))
}

fn e21() -> DiffFunction {
    DiffFunction::exp_r(q(-1, 1), q(1, 1))
}

fn e12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 1), q(-1, 1))
}

/// `ℌ_Θ` together with its parameter.
#[derive(Clone, Debug)]
pub struct HamiltonianOperator {
    theta: DiffFunction,
    op: MatrixDiffOperator,
}

impl HamiltonianOperator {
    pub fn theta(&self) -> &DiffFunction {
        &self.theta
    }

    pub fn operator(&self) -> &MatrixDiffOperator {
        &self.op
    }

    pub fn apply(&self, l: &Cosymmetry) -> Result<EvolutionaryField, HamiltonianError> {
        let v = self.op.apply(&l.lambda, &ctx())?;
        Ok(EvolutionaryField::new([v[0].clone(), v[1].clone(), v[2].clone()])?)
    }

    fn apply_vec(&self, v: &[DiffFunction; 3]) -> Result<[DiffFunction; 3], HamiltonianError> {
        let out = self.op.apply(v, &ctx())?;
        Ok([to_modified(&out[0])?, to_modified(&out[1])?, to_modified(&out[2])?])
    }
}

impl fmt::Display for HamiltonianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H[Θ = {}]\n{}", self.theta, self.op)
    }
}

/// `ℌ_Θ = e^{r²−r¹}(diag(−1, 1, Θe^{r²−r¹})𝒟ₓ − ½M)`, entries in modified
/// coordinates, with `f³³ = e^{2r²−2r¹}((r²ₓ−r¹ₓ)Θ + ½r³ₓΘ′)` so that the
/// operator is skew-adjoint for every `Θ`.
pub fn make_h(theta: &DiffFunction) -> Result<HamiltonianOperator, HamiltonianError> {
    let theta = to_modified(theta)?;
    let e = e21();
    let e2 = e.pow(2);
    let r3x = to_modified(&DiffFunction::r(3, 1))?;
    let half = (DiffFunction::r(2, 1) - DiffFunction::r(1, 1)).scale(q(1, 2));
    let f33 = &e2 * &(half.scale_int(2) * &theta + (&r3x * &d_omega0(&theta)).scale(q(1, 2)));
    let er3 = &e * &r3x;

    let mut m = MatrixDiffOperator::zero(3);
    m.set(0, 0, DiffOp::dx(-e.clone(), 1).add(&DiffOp::mul(-(&e * &half))));
    m.set(0, 1, DiffOp::mul(&e * &half));
    m.set(0, 2, DiffOp::mul(er3.clone()));
    m.set(1, 0, DiffOp::mul(-(&e * &half)));
    m.set(1, 1, DiffOp::dx(e.clone(), 1).add(&DiffOp::mul(&e * &half)));
    m.set(1, 2, DiffOp::mul(er3.clone()));
    m.set(2, 0, DiffOp::mul(-er3.clone()));
    m.set(2, 1, DiffOp::mul(-er3));
    m.set(2, 2, DiffOp::dx(&e2 * &theta, 1).add(&DiffOp::mul(f33)));
    Ok(HamiltonianOperator { theta, op: m })
}

/// `M† = −M` entrywise.
pub fn is_skew_adjoint(m: &MatrixDiffOperator) -> Result<bool, HamiltonianError> {
    Ok(m.formal_adjoint(&ctx())?.same(&m.neg())?)
}

/// Image of one cosymmetry under a Noether operator.
#[derive(Clone, Debug)]
pub struct NoetherEntry {
    pub image: EvolutionaryField,
    /// The image vanishes identically.
    pub annihilated: bool,
    pub report: Report,
}

#[derive(Clone, Debug)]
pub struct NoetherReport {
    pub pass: bool,
    pub entries: Vec<NoetherEntry>,
}

/// Checks that `ℌ_Θ λ` is a symmetry for every sampled cosymmetry.
pub fn noether_check(h: &HamiltonianOperator, samples: &[Cosymmetry]) -> Result<NoetherReport, HamiltonianError> {
    let entries = samples
        .par_iter()
        .map(|l| {
            let image = h.apply(l)?;
            let annihilated = image.is_zero()?;
            let report = is_symmetry(&image)?;
            Ok(NoetherEntry {
                image,
                annihilated,
                report,
            })
        })
        .collect::<Result<Vec<_>, HamiltonianError>>()?;
    Ok(NoetherReport {
        pass: entries.iter().all(|e| e.report.pass),
        entries,
    })
}

/// Variational derivatives of `e^{r¹−r²}` and `e^{r¹−r²}Θ̄(ω⁰)`; the second
/// is a Casimir of `ℌ_Θ` when `Θ̄′² = 1/Θ`.
pub fn casimirs(theta_bar: &DiffFunction) -> Result<[Cosymmetry; 2], HamiltonianError> {
    let a = euler_operator(&e12())?;
    let b = euler_operator(&(e12() * to_modified(theta_bar)?))?;
    Ok([Cosymmetry::new(a)?, Cosymmetry::new(b)?])
}

/// Residuals: both Casimir images and `ΘΘ̄′² − 1`.
pub fn casimir_check(h: &HamiltonianOperator, theta_bar: &DiffFunction) -> Result<Report, HamiltonianError> {
    let mut res = Vec::with_capacity(7);
    for c in casimirs(theta_bar)? {
        res.extend(h.apply(&c)?.eta);
    }
    res.push(h.theta() * &d_omega0(theta_bar).pow(2) - DiffFunction::one());
    Ok(Report::from_residuals(res)?)
}

fn vec_add(a: &mut [DiffFunction; 3], b: Vec<DiffFunction>) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// `[γ¹, γ²] = ℓ_{γ²}ℌγ¹ + ℓ†_{ℌγ¹}γ² + (ℓ_{γ¹} − ℓ†_{γ¹})ℌγ²`.
pub fn cosym_bracket(
    g1: &Cosymmetry,
    g2: &Cosymmetry,
    h: &HamiltonianOperator,
) -> Result<Cosymmetry, HamiltonianError> {
    let c = ctx();
    let a = h.apply_vec(&g1.lambda)?;
    let b = h.apply_vec(&g2.lambda)?;
    let l1 = frechet(&g1.lambda)?;
    let skew1 = l1.add(&l1.formal_adjoint(&c)?.neg());
    let mut out: [DiffFunction; 3] = Default::default();
    vec_add(&mut out, frechet(&g2.lambda)?.apply(&a, &c)?);
    vec_add(&mut out, frechet(&a)?.formal_adjoint(&c)?.apply(&g2.lambda, &c)?);
    vec_add(&mut out, skew1.apply(&b, &c)?);
    Ok(Cosymmetry::new(out)?)
}

/// Residuals of `ℌ[γ¹, γ²] = [ℌγ¹, ℌγ²]`.
pub fn homomorphism_check(
    g1: &Cosymmetry,
    g2: &Cosymmetry,
    h: &HamiltonianOperator,
) -> Result<Report, HamiltonianError> {
    let lhs = h.apply(&cosym_bracket(g1, g2, h)?)?;
    let rhs = lie_bracket(&h.apply(g1)?, &h.apply(g2)?)?;
    Ok(Report::from_residuals(lhs.sub(&rhs).eta.to_vec())?)
}

/// `𝒲̌(ΘÂu + ½Θ′ω¹u)` with `u = Σ_κ(−𝒜̂)^κΩ_{ω^κ}`: the image under `ℌ_Θ` of
/// the family-1 characteristic of `Ω`. For constant `Θ` this is `𝒲̌(𝒜̂(Θu))`.
pub fn make_hamiltonian_symmetry_w(theta: &DiffFunction, omega: &DiffFunction) -> Result<EvolutionaryField, HamiltonianError> {
    let theta = to_modified(theta)?;
    let u = e_prime(omega);
    let bar = &theta * &ahat(&u) + (d_omega0(&theta) * DiffFunction::omega(1) * u).scale(q(1, 2));
    Ok(make_w(&bar)?)
}
