//! Named currents: physical balance laws, the generating pair and the
//! low-order translation-invariant currents.

use expr_kernel::{q, DiffFunction, Q};
use jet_calculus::velocity;
use model::{physical_fields, TildeOp};

use crate::families::{make_current_family1, make_current_family2, QOperator};
use crate::{ConservationError, ConservedCurrent};

#[derive(Clone, Debug)]
pub struct NamedCurrent {
    pub name: String,
    pub current: ConservedCurrent,
}

/// A family member together with the balance law it reproduces:
/// `current = ratio · (density, flux)` in physical variables.
#[derive(Clone, Debug)]
pub struct PhysicalLaw {
    pub name: String,
    pub current: ConservedCurrent,
    pub density: DiffFunction,
    pub flux: DiffFunction,
    pub ratio: Q,
}

fn r(i: u8, k: u32) -> DiffFunction {
    DiffFunction::r(i, k)
}

fn e12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 1), q(-1, 1))
}

/// Phase masses, mixture mass, mixture momentum and energy.
pub fn physical_laws() -> Result<Vec<PhysicalLaw>, ConservationError> {
    let p = physical_fields();
    let w0 = DiffFunction::omega(0);
    let inv = (DiffFunction::one() + &w0).recip();
    let half = DiffFunction::exp_r(q(1, 2), q(-1, 2));
    let u = p.u.clone();
    let ln_rho = r(1, 0) - r(2, 0);
    let u2 = &u * &u;
    let energy = u2.scale(q(1, 2)) + &ln_rho;
    let law = |name: &str, current, density, flux, ratio| PhysicalLaw {
        name: name.to_string(),
        current,
        density,
        flux,
        ratio,
    };
    Ok(vec![
        law(
            "phase-1 mass",
            make_current_family1(&inv)?,
            p.rho1.clone(),
            &p.rho1 * &u,
            Q::from_integer(1),
        ),
        law(
            "phase-2 mass",
            make_current_family1(&(&w0 * &inv))?,
            p.rho2.clone(),
            &p.rho2 * &u,
            Q::from_integer(1),
        ),
        law(
            "mixture mass",
            make_current_family1(&DiffFunction::one())?,
            p.rho.clone(),
            &p.rho * &u,
            Q::from_integer(1),
        ),
        law(
            "mixture momentum",
            make_current_family2(&(&half * &(&u - &DiffFunction::one())))?,
            &p.rho * &u,
            &p.rho * &(&u2 + &DiffFunction::one()),
            Q::from_integer(2),
        ),
        law(
            "energy",
            make_current_family2(&(&half * &(&u2 - &r(2, 0).scale_int(4))).scale(q(1, 8)))?,
            &p.rho * &energy,
            &p.rho * &(&(&energy + &DiffFunction::one()) * &u),
            q(1, 2),
        ),
    ])
}

/// `e^{r¹−r²}(r³, (r¹+r²)r³)` and `e^{r¹−r²}(x−V³t, V³(x−V³t)−t)`.
pub fn generating_currents() -> Result<[ConservedCurrent; 2], ConservationError> {
    let e = e12();
    let r3 = r(3, 0);
    let v3 = velocity(3);
    let xi = DiffFunction::x() - &v3 * &DiffFunction::t();
    Ok([
        ConservedCurrent::new(&e * &r3, &e * &(&v3 * &r3))?,
        ConservedCurrent::new(&e * &xi, &e * &(&v3 * &xi - DiffFunction::t()))?,
    ])
}

/// A translation-invariant current with the family-3 operator whose
/// conservation law it represents.
#[derive(Clone, Debug)]
pub struct InvariantCurrent {
    pub name: String,
    pub current: ConservedCurrent,
    pub op: QOperator,
}

fn dz_poly_word(left: &[(i64, usize)], mid: &[TildeOp], right: &[(i64, usize)]) -> QOperator {
    let mut parts = Vec::new();
    for (a, i) in left {
        for (b, j) in right {
            let mut w = vec![TildeOp::Dz; *i];
            w.extend_from_slice(mid);
            w.extend(std::iter::repeat(TildeOp::Dz).take(*j));
            parts.push((a * b, w));
        }
    }
    QOperator::combination(parts)
}

/// The four second-order translation-invariant currents from the third family.
pub fn invariant_currents() -> Result<Vec<InvariantCurrent>, ConservationError> {
    use TildeOp::{Dy, Dz};
    let e = e12();
    let (r1x, r2x) = (r(1, 1), r(2, 1));
    let (v1, v2) = (velocity(1), velocity(2));
    let two = |c: &DiffFunction| c.scale_int(2);

    let c1 = ConservedCurrent::new(
        two(&(&e * &(r2x.pow(-1) - r1x.pow(-1)))),
        two(&(&e * &(&v2 * &r2x.pow(-1) - &v1 * &r1x.pow(-1)))),
    )?;

    let a = (r(1, 2).scale_int(2) + &r1x * &r2x).pow(2);
    let b = &r2x * &r1x.pow(3);
    let pre = two(&(&e * &r1x.pow(-5)));
    let c2 = ConservedCurrent::new(&pre * &(&a - &b), &pre * &(&v1 * &a - &v2 * &b))?;

    let a = (r(2, 2).scale_int(2) - &r1x * &r2x).pow(2);
    let b = &r1x * &r2x.pow(3);
    let pre = -two(&(&e * &r2x.pow(-5)));
    let c3 = ConservedCurrent::new(&pre * &(&a - &b), &pre * &(&v2 * &a - &v1 * &b))?;

    let z1 = r(1, 0) * r1x.pow(-1) - r(2, 0) * &r1x * r2x.pow(-2);
    let z2 = r(2, 0) * r2x.pow(-5) * (r(2, 2).scale_int(2) - &r1x * &r2x).pow(2) - r(1, 0) * r2x.pow(-1);
    let c4 = ConservedCurrent::new(-(&e * &(&z1 + &z2)), -(&e * &(&v1 * &z1 + &v2 * &z2)))?;

    let y01 = QOperator::combination(vec![(1, vec![Dz, Dz, Dz]), (-2, vec![Dz]), (1, vec![Dy])]);
    let y03 = QOperator::combination(vec![(1, vec![Dy, Dy, Dy]), (-2, vec![Dy]), (1, vec![Dz])]);
    let z01 = QOperator::combination(vec![(1, vec![Dz; 5]), (-2, vec![Dz; 3]), (1, vec![Dz])]);
    let z10 = dz_poly_word(
        &[(1, 2), (2, 1), (1, 0)],
        &[TildeOp::J(Q::from_integer(0))],
        &[(1, 2), (-2, 1), (1, 0)],
    );
    let named = |name: &str, current, op| InvariantCurrent {
        name: name.to_string(),
        current,
        op,
    };
    Ok(vec![
        named("Y01", c1, y01),
        named("Y03", c2, y03),
        named("Z01", c3, z01),
        named("Z10", c4, z10),
    ])
}
