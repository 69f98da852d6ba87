//! Hamiltonian densities of the system with respect to `ℌ_Θ`.

use expr_kernel::{q, DiffFunction};
use jet_calculus::{euler_operator, to_modified, velocity, Report};

use crate::{d_omega0, make_h, HamiltonianError};

/// `¼((r¹+r²)²e^{r¹−r²} + c₀(r¹+r²) + 2(r¹−r²+Ξ(ω⁰))e^{r¹−r²})`.
pub fn hamiltonian_density(c0: &DiffFunction, xi: &DiffFunction) -> DiffFunction {
    let e = DiffFunction::exp_r(q(1, 1), q(-1, 1));
    let b = DiffFunction::r(1, 0) + DiffFunction::r(2, 0);
    let a = DiffFunction::r(1, 0) - DiffFunction::r(2, 0);
    let h = &b.pow(2) * &e + c0 * &b + (a + xi).scale_int(2) * e;
    h.scale(q(1, 4))
}

/// `ΘΞ″ + ½Θ′Ξ′ − c₀`.
pub fn xi_condition(theta: &DiffFunction, c0: &DiffFunction, xi: &DiffFunction) -> DiffFunction {
    let x1 = d_omega0(xi);
    theta * &d_omega0(&x1) + (d_omega0(theta) * x1).scale(q(1, 2)) - c0
}

#[derive(Clone, Debug)]
pub struct FormReport {
    pub density: DiffFunction,
    pub condition: DiffFunction,
    /// Residuals of `ℌ_Θ δH + (Vⁱrⁱₓ)ᵢ`.
    pub hamilton: Report,
}

/// Checks the auxiliary condition on `Ξ` and the Hamiltonian form of the
/// system for the density built from `(c₀, Ξ)`.
pub fn hamiltonian_form_check(
    theta: &DiffFunction,
    c0: &DiffFunction,
    xi: &DiffFunction,
) -> Result<FormReport, HamiltonianError> {
    let theta = to_modified(theta)?;
    let xi = to_modified(xi)?;
    let density = hamiltonian_density(c0, &xi);
    let h = make_h(&theta)?;
    let grad = euler_operator(&density)?;
    let image = h.operator().apply(&grad, &crate::ctx())?;
    let res = image
        .into_iter()
        .enumerate()
        .map(|(i, e)| e + velocity(i as u8 + 1) * DiffFunction::r(i as u8 + 1, 1))
        .collect();
    let hamilton = Report::from_residuals(res)?;
    let condition = xi_condition(&theta, c0, &xi);
    let cond = Report::from_residuals(vec![condition.clone()])?;
    if !cond.pass {
        return Err(HamiltonianError::ConstraintViolated {
            residual: cond.residuals[0].to_string(),
            hamilton_pass: hamilton.pass,
        });
    }
    Ok(FormReport {
        density,
        condition,
        hamilton,
    })
}
