use expr_kernel::gen::ExprGen;
use expr_kernel::{normalize, q, Atom, DiffFunction};
use jet_calculus::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn r(i: u8, k: u32) -> DiffFunction {
    DiffFunction::r(i, k)
}

fn w(k: u32) -> DiffFunction {
    DiffFunction::omega(k)
}

fn e(a: i64, b: i64) -> DiffFunction {
    DiffFunction::exp_r(q(a, 1), q(b, 1))
}

fn same(a: &DiffFunction, b: &DiffFunction) -> bool {
    jet_equals(a, b).unwrap().holds()
}

fn randoms(atoms: Vec<Atom>, n: usize, seed: u64) -> Vec<DiffFunction> {
    let g = ExprGen::with_atoms(atoms);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        if let Ok(f) = normalize(&g.tree(&mut rng, 4)) {
            if f.len() < 60 {
                out.push(f);
            }
        }
    }
    out
}

fn omega_only(f: &DiffFunction) -> DiffFunction {
    f.filter_terms(|m| {
        m.exp().is_empty()
            && DiffFunction::term(q(1, 1), m.clone())
                .base_atoms()
                .iter()
                .all(|a| a.omega_index().is_some())
    })
}

fn restricted_atoms() -> Vec<Atom> {
    vec![Atom::T, Atom::X, Atom::r(1, 0), Atom::r(2, 0), Atom::r(1, 1), Atom::r(2, 2), Atom::r(3, 0), Atom::Omega(1)]
}

#[test]
fn dx_examples() {
    let std = JetContext::standard();
    assert_eq!(total_dx(&r(1, 0), &std), r(1, 1));
    assert_eq!(total_dx(&e(-1, 1), &std), (r(2, 1) - r(1, 1)) * e(-1, 1));
    assert_eq!(total_dx(&w(0), &JetContext::modified()), e(1, -1) * w(1));
}

#[test]
fn dt_examples() {
    let std = JetContext::standard();
    assert_eq!(total_dt(&r(1, 0), &std).unwrap(), -(velocity(1) * r(1, 1)));
    let got = total_dt(&e(1, -1), &std).unwrap();
    let want = -(e(1, -1) * (velocity(1) * r(1, 1) - velocity(2) * r(2, 1)));
    assert_eq!(got, want);
    for ctx in [JetContext::standard(), JetContext::modified()] {
        for k in 0..=3 {
            let wk = w(k);
            let b = total_dt(&wk, &ctx).unwrap() + (r(1, 0) + r(2, 0)) * total_dx(&wk, &ctx);
            assert!(jet_is_zero(&b).unwrap(), "B w{k}");
            assert!(jet_is_zero(&op_b(&wk, &ctx).unwrap()).unwrap());
        }
    }
    assert_eq!(total_dt(&r(1, 0), &JetContext::off_shell()), Err(JetError::OffShellMode));
}

#[test]
fn full_derivatives() {
    assert_eq!(full_dt(&r(3, 0)).unwrap(), DiffFunction::mixed(3, 1, 0));
    let rho = e(1, -1);
    let sigma = (r(1, 0) + r(2, 0)) * &rho;
    let div = full_dt(&rho).unwrap() + full_dx(&sigma);
    assert_eq!(div, &rho * &(system_lhs(1) - system_lhs(2)));
    let atoms = vec![Atom::T, Atom::X, Atom::r(1, 0), Atom::r(2, 1), Atom::mixed(1, 1, 0), Atom::mixed(3, 1, 1), Atom::r(3, 0)];
    for f in randoms(atoms, 50, 1) {
        let a = full_dx(&full_dt(&f).unwrap());
        let b = full_dt(&full_dx(&f)).unwrap();
        assert!(jet_is_zero(&(a - b)).unwrap());
    }
}

#[test]
fn a_and_b() {
    let ctx = JetContext::modified();
    for k in 0..=3 {
        assert_eq!(op_a(&w(k), &ctx), w(k + 1));
    }
    for f in randoms(restricted_atoms(), 50, 2) {
        let ab = op_a(&op_b(&f, &ctx).unwrap(), &ctx);
        let ba = op_b(&op_a(&f, &ctx), &ctx).unwrap();
        assert!(jet_is_zero(&(ab - ba)).unwrap(), "{f}");
    }
}

#[test]
fn restricted_derivatives_commute() {
    for ctx in [JetContext::standard(), JetContext::modified()] {
        for f in randoms(restricted_atoms(), 100, 3) {
            let a = total_dt(&total_dx(&f, &ctx), &ctx).unwrap();
            let b = total_dx(&total_dt(&f, &ctx).unwrap(), &ctx);
            assert!(jet_is_zero(&(a - b)).unwrap(), "{f}");
        }
    }
}

#[test]
fn b_annihilates_omega_functions() {
    let ctx = JetContext::modified();
    let atoms = vec![Atom::r(3, 0), Atom::Omega(1), Atom::Omega(2), Atom::Omega(3)];
    let fs: Vec<DiffFunction> = randoms(atoms, 40, 4).iter().map(omega_only).collect();
    assert!(fs.iter().filter(|f| f.as_constant().is_none()).count() >= 20);
    for f in fs {
        assert!(jet_is_zero(&op_b(&f, &ctx).unwrap()).unwrap(), "{f}");
    }
}

#[test]
fn euler_examples() {
    let [a, b, c] = euler_operator(&e(1, -1)).unwrap();
    assert_eq!((a, b, c), (e(1, -1), -e(1, -1), DiffFunction::zero()));
    let [a, b, c] = euler_operator(&(r(1, 0) * r(1, 1))).unwrap();
    assert!(a.is_zero() && b.is_zero() && c.is_zero());
    let ctx = JetContext::standard();
    for g in randoms(restricted_atoms(), 60, 5) {
        let g = to_standard(&g).unwrap();
        for comp in euler_operator(&total_dx(&g, &ctx)).unwrap() {
            assert!(jet_is_zero(&comp).unwrap(), "{g}");
        }
    }
}

#[test]
fn full_euler_kills_divergences() {
    let atoms = vec![Atom::T, Atom::X, Atom::r(1, 0), Atom::r(2, 1), Atom::mixed(1, 1, 0), Atom::r(3, 0)];
    let gs = randoms(atoms, 40, 6);
    for pair in gs.chunks(2) {
        let div = full_dt(&pair[0]).unwrap() + full_dx(&pair[1]);
        for comp in euler_full(&div, 3).unwrap() {
            assert!(jet_is_zero(&comp).unwrap());
        }
    }
}

fn lhs() -> Vec<DiffFunction> {
    (1..=3).map(system_lhs).collect()
}

#[test]
fn linearized_system() {
    let l = frechet_full(&lhs()).unwrap();
    let ctx = JetContext::off_shell();
    let etas = randoms(vec![Atom::X, Atom::r(1, 0), Atom::r(2, 1), Atom::r(3, 0), Atom::r(3, 1)], 30, 7);
    for eta in etas.chunks(3) {
        let got = l.apply(eta, &ctx).unwrap();
        for k in 0..3u8 {
            let ek = &eta[k as usize];
            let want = full_dt(ek).unwrap()
                + velocity(k + 1) * full_dx(ek)
                + (&eta[0] + &eta[1]) * r(k + 1, 1);
            assert!(jet_is_zero(&(&got[k as usize] - &want)).unwrap());
        }
    }
}

#[test]
fn adjoint_system() {
    let ctx = JetContext::off_shell();
    let l = frechet_full(&lhs()).unwrap();
    let adj = l.formal_adjoint(&ctx).unwrap();
    let lams = randoms(vec![Atom::T, Atom::r(1, 0), Atom::r(2, 1), Atom::r(3, 0)], 30, 8);
    for lam in lams.chunks(3) {
        let got = adj.apply(lam, &ctx).unwrap();
        let cross = &lam[0] * &r(1, 1) + &lam[1] * &r(2, 1) + &lam[2] * &r(3, 1);
        for k in 0..3usize {
            let mut want = -full_dt(&lam[k]).unwrap() - full_dx(&(velocity(k as u8 + 1) * &lam[k]));
            if k < 2 {
                want += &cross;
            }
            assert!(jet_is_zero(&(&got[k] - &want)).unwrap());
        }
    }
    assert!(adj.formal_adjoint(&ctx).unwrap().same(&l).unwrap());
}

#[test]
fn adjoint_of_dx() {
    let ctx = JetContext::standard();
    let d = DiffOp::dx(DiffFunction::one(), 1);
    assert_eq!(d.adjoint(&ctx).unwrap(), DiffOp::dx(DiffFunction::int(-1), 1));
    let fs = randoms(restricted_atoms(), 12, 9);
    let mut m = MatrixDiffOperator::zero(3);
    for (n, f) in fs.iter().enumerate() {
        let (i, j) = (n % 3, (n / 3) % 3);
        m.entry_mut(i, j).add_term(f.clone(), 0, (n % 4) as u32);
    }
    let back = m.formal_adjoint(&ctx).unwrap().formal_adjoint(&ctx).unwrap();
    assert!(back.same(&m).unwrap());
}

#[test]
fn frechet_is_a_derivation() {
    let ctx = JetContext::standard();
    let fs = randoms(vec![Atom::X, Atom::r(1, 0), Atom::r(2, 1), Atom::r(3, 2), Atom::r(1, 2)], 40, 10);
    let etas = randoms(vec![Atom::r(1, 0), Atom::r(2, 0), Atom::r(3, 1)], 3, 11);
    let zero = DiffFunction::zero;
    for pair in fs.chunks(2) {
        let (f, g) = (&pair[0], &pair[1]);
        let lfg = frechet(&[f * g, zero(), zero()]).unwrap().apply(&etas, &ctx).unwrap();
        let lf = frechet(&[f.clone(), zero(), zero()]).unwrap().apply(&etas, &ctx).unwrap();
        let lg = frechet(&[g.clone(), zero(), zero()]).unwrap().apply(&etas, &ctx).unwrap();
        assert!(jet_is_zero(&(&lfg[0] - &(f * &lg[0] + g * &lf[0]))).unwrap());
    }
}

#[test]
fn image_of_ahat() {
    assert!(in_image_of_ahat(&w(1)).unwrap());
    assert!(!in_image_of_ahat(&DiffFunction::one()).unwrap());
    let om = w(0) * w(2) + w(1) * w(1);
    assert_eq!(ahat(&(w(0) * w(1))), om);
    assert!(in_image_of_ahat(&om).unwrap());
    assert!(!in_image_of_ahat(&w(0)).unwrap());
    assert!(!in_image_of_ahat(&(w(0) * w(0))).unwrap());
    let gs: Vec<DiffFunction> = randoms(vec![Atom::r(3, 0), Atom::Omega(1), Atom::Omega(2)], 40, 12)
        .iter()
        .map(omega_only)
        .collect();
    assert!(gs.iter().filter(|g| g.as_constant().is_none()).count() >= 20);
    for g in gs {
        assert!(in_image_of_ahat(&ahat(&g)).unwrap(), "{g}");
    }
}

#[test]
fn orders() {
    assert_eq!(ord(&(w(3) + w(0)), Family::Omega), Some(3));
    assert_eq!(ord(&(r(1, 2) * w(1)), Family::R1), Some(2));
    assert_eq!(ord(&e(0, 1), Family::R1), None);
    assert_eq!(ord(&e(1, 0), Family::R1), Some(0));
    assert_eq!(ord(&r(3, 2), Family::Omega), Some(2));
}

#[test]
fn coordinate_round_trip() {
    assert!(same(&w(1), &(e(-1, 1) * r(3, 1))));
    assert_eq!(to_standard(&w(1)).unwrap(), e(-1, 1) * r(3, 1));
    let atoms = vec![Atom::r(3, 0), Atom::Omega(1), Atom::Omega(2), Atom::Omega(3), Atom::r(1, 1), Atom::X];
    for f in randoms(atoms, 60, 13) {
        assert_eq!(to_modified(&to_standard(&f).unwrap()).unwrap(), f);
    }
}

#[test]
fn prolongation_agrees_across_coordinates() {
    let ctx = JetContext::modified();
    let etas = randoms(vec![Atom::X, Atom::r(1, 0), Atom::r(2, 1), Atom::r(3, 0), Atom::Omega(1)], 30, 14);
    let targets = [w(1), w(2), w(3) * w(1), r(1, 2) * w(2)];
    for eta in etas.chunks(3) {
        let eta = [eta[0].clone(), eta[1].clone(), eta[2].clone()];
        for t in &targets {
            let a = prolong(&eta, t, &ctx);
            let b = prolong(&eta, &to_standard(t).unwrap(), &JetContext::standard());
            assert!(same(&a, &b), "{t}");
        }
        assert!(same(&prolong(&eta, &r(1, 2), &ctx), &dx_pow(&eta[0], 2, &ctx)));
    }
}

#[test]
fn order_guard() {
    let ctx = JetContext::standard().with_max_order(2);
    assert!(ctx.check_order(&r(1, 2)).is_ok());
    assert!(matches!(ctx.check_order(&r(1, 3)), Err(JetError::OrderExceeded { .. })));
}

#[test]
fn on_shell_restriction() {
    let ctx = JetContext::standard();
    for k in 1..=3u8 {
        assert!(on_shell(&system_lhs(k)).unwrap().is_zero());
    }
    let f = r(1, 1) * e(1, -1) + r(3, 0);
    assert_eq!(on_shell(&full_dt(&f).unwrap()).unwrap(), total_dt(&f, &ctx).unwrap());
}

#[test]
fn layered_euler_detects_x_divergences() {
    let f = DiffFunction::r(1, 0) * DiffFunction::mixed(2, 1, 0) * DiffFunction::r(3, 1);
    let div = jet_calculus::full_dx(&f);
    for layer in jet_calculus::euler_x_layers(&div, 3).unwrap() {
        for e in layer {
            assert!(jet_calculus::jet_is_zero(&e).unwrap());
        }
    }
    // A t-divergence is not an x-divergence.
    let tdiv = jet_calculus::full_dt(&DiffFunction::r(1, 0).pow(2)).unwrap();
    let layers = jet_calculus::euler_x_layers(&tdiv, 3).unwrap();
    assert_eq!(layers.len(), 2);
    assert!(!layers[1][0].is_zero());
    assert!(layers[0][1].is_zero());
}
