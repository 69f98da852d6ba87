use expr_kernel::gen::ExprGen;
use expr_kernel::{eval_numeric, normalize, q, Atom, DiffFunction, Instantiation, Point};
use jet_calculus::{jet_is_zero, velocity, JetContext};
use model::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(i: u8, k: u32) -> DiffFunction {
    DiffFunction::r(i, k)
}

fn half_exp() -> DiffFunction {
    DiffFunction::exp_r(q(1, 2), q(-1, 2))
}

#[test]
fn velocities() {
    let v = characteristic_velocities();
    let mut p = Point::new();
    p.insert(Atom::r(1, 0), 0.0);
    p.insert(Atom::r(2, 0), 0.0);
    let vals: Vec<f64> = v.iter().map(|e| eval_numeric(e, &p, &Instantiation::new()).unwrap()).collect();
    assert_eq!(vals, vec![1.0, -1.0, 0.0]);
    assert_eq!(&v[0] - &v[1], DiffFunction::int(2));
    assert_eq!(&v[0] - &v[2], DiffFunction::int(1));
    assert_eq!(&v[2] - &v[1], DiffFunction::int(1));
    assert!(expr_kernel::diff_partial(&v[2], &Atom::r(3, 0)).is_zero());
}

#[test]
fn riemann_maps() {
    let r0 = riemann_from_physical(0.0, 0.5, 0.5).unwrap();
    assert_eq!(r0, [0.0, 0.0, 1.0]);
    assert_eq!(riemann_from_physical(0.3, 1.2, 0.0).unwrap()[2], 0.0);
    assert!(matches!(riemann_from_physical(0.0, -1.0, 0.5), Err(ModelError::Domain(_))));
    assert!(matches!(riemann_from_physical(0.0, 0.0, 0.5), Err(ModelError::Domain(_))));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (u, a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0), rng.gen_range(0.0..3.0));
        let back = physical_from_riemann(riemann_from_physical(u, a, b).unwrap()).unwrap();
        for (x, y) in back.iter().zip([u, a, b]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn physical_fields_match_numeric_map() {
    let f = physical_fields();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let rv = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0)];
        let mut p = Point::new();
        for i in 0..3 {
            p.insert(Atom::r(i as u8 + 1, 0), rv[i]);
        }
        let phys = physical_from_riemann(rv).unwrap();
        let inst = Instantiation::new();
        assert!((eval_numeric(&f.u, &p, &inst).unwrap() - phys[0]).abs() < 1e-12);
        assert!((eval_numeric(&f.rho1, &p, &inst).unwrap() - phys[1]).abs() < 1e-12);
        assert!((eval_numeric(&f.rho2, &p, &inst).unwrap() - phys[2]).abs() < 1e-12);
    }
}

#[test]
fn tsarev_condition() {
    assert!(semi_hamiltonian_check().unwrap());
    let decoupled = HydroSystem::new([r(1, 0), r(2, 0), r(3, 0)]);
    assert!(decoupled.is_semi_hamiltonian().unwrap());
    let swapped = HydroSystem::new([r(2, 0), r(1, 0), DiffFunction::zero()]);
    assert!(swapped.is_semi_hamiltonian().unwrap());
    let bad = HydroSystem::new([r(2, 0) * r(3, 0), DiffFunction::zero(), DiffFunction::one()]);
    assert!(!bad.is_semi_hamiltonian().unwrap());
}

#[test]
fn point_transformation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let pt: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let back = transform_t_inverse(transform_t(pt));
        for (a, b) in back.iter().zip(pt) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    let [_, x, ..] = transform_t_inverse([0.3, -0.2, 1.5, 0.0, 0.7]);
    assert!((x - (2.0 * 0.3 + 2.0 * 0.2 + 1.0) * 1.5).abs() < 1e-15);
    let [.., qv, _] = transform_t([0.0, 0.8, 0.4, -0.6, 1.0]);
    assert!((qv - (0.5_f64).exp() * 0.8).abs() < 1e-15);
    assert!(matches!(hodograph_derivatives(0.0, 1.0), Err(ModelError::DegenerateJet(_))));
}

#[test]
fn tilde_identities() {
    let ctx = JetContext::standard();
    let t = DiffFunction::t;
    let x = DiffFunction::x;
    let qt = q_tilde();
    let want_y = half_exp() * (r(1, 1).pow(-1).scale_int(2) + x() - velocity(1) * t() - t().scale_int(2));
    assert_eq!(tilde_dy(&qt, &ctx).unwrap(), want_y);
    let want_z = half_exp() * (x() - velocity(2) * t());
    assert_eq!(tilde_dz(&qt, &ctx).unwrap(), want_z);
    let want_zz = half_exp() * (r(2, 1).pow(-1).scale_int(-2) + x() - velocity(2) * t() + t().scale_int(2));
    assert_eq!(tilde_dz(&want_z, &ctx).unwrap(), want_zz);
    assert_eq!(tilde_dy(&tilde_dz(&qt, &ctx).unwrap(), &ctx).unwrap(), qt);
    assert_eq!(tilde_dy(&t(), &ctx).unwrap(), -r(1, 1).pow(-1));
    assert_eq!(tilde_dz(&t(), &ctx).unwrap(), -r(2, 1).pow(-1));
}

#[test]
fn klein_gordon_side_quantities() {
    let ctx = JetContext::standard();
    let qt = q_tilde();
    let qy = tilde_dy(&qt, &ctx).unwrap();
    let qz = tilde_dz(&qt, &ctx).unwrap();
    let qzz = tilde_dz(&qz, &ctx).unwrap();
    let k1 = &qzz - &qz.scale_int(2) + qt.clone();
    let k2 = &qy + &qz - qt.scale_int(2);
    assert_eq!(k1, half_exp() * r(2, 1).pow(-1).scale_int(-2));
    assert_eq!(k2, half_exp() * r(1, 1).pow(-1).scale_int(2));
    assert_eq!(tilde_dy(&k1, &ctx).unwrap(), k2);
    assert_eq!(tilde_dz(&k2, &ctx).unwrap(), k1);
    let sy = tilde_dy(&r(3, 0), &ctx).unwrap();
    let ratio = sy * k2.pow(-1);
    assert_eq!(ratio, DiffFunction::exp_r(q(-1, 2), q(1, 2)) * r(3, 1).scale(q(1, 2)));
}

#[test]
fn tilde_derivatives_commute() {
    let g = ExprGen::with_atoms(vec![Atom::T, Atom::X, Atom::r(1, 0), Atom::r(2, 0), Atom::r(1, 1), Atom::r(3, 0), Atom::Omega(1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ctx = JetContext::modified();
    let mut n = 0;
    while n < 20 {
        let Ok(f) = normalize(&g.tree(&mut rng, 3)) else { continue };
        if f.len() > 30 {
            continue;
        }
        let yz = tilde_dy(&tilde_dz(&f, &ctx).unwrap(), &ctx).unwrap();
        let zy = tilde_dz(&tilde_dy(&f, &ctx).unwrap(), &ctx).unwrap();
        assert!(jet_is_zero(&(yz - zy)).unwrap(), "{f}");
        n += 1;
    }
}

#[test]
fn tilde_words() {
    let ctx = JetContext::standard();
    let qt = q_tilde();
    let w = TildeWord::power_then(q(1, 2), 1, Some(TildeOp::Dy), 1);
    let direct = tilde_j(&tilde_dy(&qt, &ctx).unwrap(), &ctx).unwrap() + tilde_dy(&qt, &ctx).unwrap().scale(q(1, 2));
    assert_eq!(w.apply(&qt, &ctx).unwrap(), direct);
    assert_eq!(w.to_string(), "(J+1/2)Dy");
    assert_eq!(TildeWord::default().apply(&qt, &ctx).unwrap(), qt);
}
