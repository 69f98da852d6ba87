//! Physical variables and the point transformation to the Klein–Gordon side.

use expr_kernel::{q, DiffFunction};

use crate::ModelError;

/// `(u, ρ¹, ρ²) ↦ (r¹, r², r³) = ((u+ln ρ)/2, (u−ln ρ)/2, ρ²/ρ¹)`, `ρ = ρ¹+ρ²`.
pub fn riemann_from_physical(u: f64, rho1: f64, rho2: f64) -> Result<[f64; 3], ModelError> {
    let rho = rho1 + rho2;
    if rho <= 0.0 {
        return Err(ModelError::Domain(format!("total density {rho} is not positive")));
    }
    if rho1 == 0.0 {
        return Err(ModelError::Domain("first density vanishes".to_string()));
    }
    let l = rho.ln();
    Ok([(u + l) / 2.0, (u - l) / 2.0, rho2 / rho1])
}

pub fn physical_from_riemann(r: [f64; 3]) -> Result<[f64; 3], ModelError> {
    if r[2] == -1.0 {
        return Err(ModelError::Domain("r³ = −1 makes the first density infinite".to_string()));
    }
    let rho = (r[0] - r[1]).exp();
    let rho1 = rho / (1.0 + r[2]);
    Ok([r[0] + r[1], rho1, r[2] * rho1])
}

/// Physical fields as expressions in the Riemann invariants.
#[derive(Clone, Debug)]
pub struct PhysicalFields {
    pub u: DiffFunction,
    pub rho: DiffFunction,
    pub rho1: DiffFunction,
    pub rho2: DiffFunction,
}

pub fn physical_fields() -> PhysicalFields {
    let rho = DiffFunction::exp_r(q(1, 1), q(-1, 1));
    let inv = (DiffFunction::one() + DiffFunction::r(3, 0)).recip();
    let rho1 = &rho * &inv;
    PhysicalFields {
        u: DiffFunction::r(1, 0) + DiffFunction::r(2, 0),
        rho2: DiffFunction::r(3, 0) * &rho1,
        rho1,
        rho,
    }
}

/// `𝒯: (t, x, r¹, r², r³) ↦ (y, z, p, q, s)`.
pub fn transform_t(pt: [f64; 5]) -> [f64; 5] {
    let [t, x, r1, r2, r3] = pt;
    [
        r1 / 2.0,
        -r2 / 2.0,
        t,
        ((r1 - r2) / 2.0).exp() * (x - (r1 + r2 + 1.0) * t),
        r3,
    ]
}

/// `𝒯̂: (y, z, p, q, s) ↦ (t, x, r¹, r², r³)`.
pub fn transform_t_inverse(pt: [f64; 5]) -> [f64; 5] {
    let [y, z, p, qv, s] = pt;
    [p, (-y - z).exp() * qv + (2.0 * y - 2.0 * z + 1.0) * p, 2.0 * y, -2.0 * z, s]
}

/// First derivatives `(p_y, p_z)` of the hodograph variable at a jet point.
pub fn hodograph_derivatives(r1x: f64, r2x: f64) -> Result<[f64; 2], ModelError> {
    if r1x.abs() < 1e-12 || r2x.abs() < 1e-12 {
        return Err(ModelError::DegenerateJet(format!("r¹ₓ = {r1x}, r²ₓ = {r2x}")));
    }
    Ok([-1.0 / r1x, -1.0 / r2x])
}
