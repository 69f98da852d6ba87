use expr_kernel::{diff_partial, Atom, DiffFunction};
use jet_calculus::{jet_is_zero, velocity};

use crate::ModelError;

/// A diagonal three-component system `rⁱ_t + Vⁱ(r) rⁱ_x = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HydroSystem {
    velocities: [DiffFunction; 3],
}

/// `(r¹+r²+1, r¹+r²−1, r¹+r²)`.
pub fn characteristic_velocities() -> [DiffFunction; 3] {
    [velocity(1), velocity(2), velocity(3)]
}

impl HydroSystem {
    pub fn drift_flux() -> HydroSystem {
        HydroSystem {
            velocities: characteristic_velocities(),
        }
    }

    pub fn new(velocities: [DiffFunction; 3]) -> HydroSystem {
        HydroSystem { velocities }
    }

    pub fn velocities(&self) -> &[DiffFunction; 3] {
        &self.velocities
    }

    /// Tsarev's condition
    /// `∂ᵢ(∂ⱼVᵏ/(Vʲ−Vᵏ)) = ∂ⱼ(∂ᵢVᵏ/(Vⁱ−Vᵏ))` for pairwise distinct `i, j, k`.
    pub fn is_semi_hamiltonian(&self) -> Result<bool, ModelError> {
        let r = |i: usize| Atom::r(i as u8 + 1, 0);
        let v = &self.velocities;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let lhs = diff_partial(&(diff_partial(&v[k], &r(j)) * (&v[j] - &v[k]).recip()), &r(i));
                    let rhs = diff_partial(&(diff_partial(&v[k], &r(i)) * (&v[i] - &v[k]).recip()), &r(j));
                    if !jet_is_zero(&(lhs - rhs))? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

pub fn semi_hamiltonian_check() -> Result<bool, ModelError> {
    HydroSystem::drift_flux().is_semi_hamiltonian()
}
