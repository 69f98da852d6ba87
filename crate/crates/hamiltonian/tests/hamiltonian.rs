use conservation::{
    is_cosymmetry, make_characteristic_family1, make_cosymmetry_family1, make_cosymmetry_family2, make_cosymmetry_family3, Cosymmetry, QOperator,
};
use expr_kernel::{diff_partial, eval_numeric, parse, q, Atom, DiffFunction, Instantiation, Point};
use hamiltonian::*;
use jet_calculus::{ahat, velocity, DiffOp, MatrixDiffOperator, Report};
use model::tilde_dy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symmetry::{is_symmetry, make_p, make_r_from_gamma, make_w, EvolutionaryField, GammaSpec};

fn p(s: &str) -> DiffFunction {
    parse(s).unwrap()
}

fn w(k: u32) -> DiffFunction {
    DiffFunction::omega(k)
}

fn e21() -> DiffFunction {
    DiffFunction::exp_r(q(-1, 1), q(1, 1))
}

fn e12() -> DiffFunction {
    DiffFunction::exp_r(q(1, 1), q(-1, 1))
}

fn zero(e: &DiffFunction) -> bool {
    Report::from_residuals(vec![e.clone()]).unwrap().pass
}

fn theta() -> DiffFunction {
    theta_symbol("Theta")
}

#[test]
fn operator_entries() {
    let h1 = make_h(&DiffFunction::one()).unwrap();
    let e2 = e21().pow(2);
    let entry = h1.operator().get(2, 2);
    assert!(zero(&(entry.coefficient(0, 1) - &e2)));
    assert!(zero(&(entry.coefficient(0, 0) - &e2 * &(DiffFunction::r(2, 1) - DiffFunction::r(1, 1)))));

    let h0 = make_h(&DiffFunction::zero()).unwrap();
    assert!(h0.operator().get(2, 2).is_zero());
    for k in 0..2 {
        assert!(h0.operator().get(k, 2).x_order().unwrap_or(0) == 0);
        assert!(h0.operator().get(2, k).x_order().unwrap_or(0) == 0);
    }
    let a12 = h1.operator().get(0, 1).adjoint(&ctx()).unwrap();
    assert!(a12.same(&h1.operator().get(1, 0).neg()).unwrap());
}

#[test]
fn skew_adjointness() {
    for t in [DiffFunction::one(), DiffFunction::zero(), theta(), p("(^ w0 2)")] {
        assert!(is_skew_adjoint(make_h(&t).unwrap().operator()).unwrap(), "Θ = {t}");
    }
    let mut dx = MatrixDiffOperator::zero(1);
    dx.set(0, 0, DiffOp::dx(DiffFunction::one(), 1));
    assert!(is_skew_adjoint(&dx).unwrap());
    let id = MatrixDiffOperator::diagonal(vec![DiffOp::mul(DiffFunction::one()); 3]);
    assert!(!is_skew_adjoint(&id).unwrap());
}

fn sample_cosymmetries() -> Vec<(String, Cosymmetry)> {
    let mut out = Vec::new();
    for o in ["1", "w0", "(* w0 w1)"] {
        out.push((format!("family 1, Ω = {o}"), make_cosymmetry_family1(&p(o)).unwrap()));
    }
    for f in ["(exp (* 1/2 (- r1 r2)))", "(exp (- r1 (* 1/4 r2)))", "(exp (* 1/2 (- r2 r1)))"] {
        out.push((format!("family 2, Φ = {f}"), make_cosymmetry_family2(&p(f)).unwrap()));
    }
    for s in ["J^1", "Dy^1", "Dz^1"] {
        let op = QOperator::cosymmetry_form(GammaSpec::parse(s).unwrap());
        out.push((format!("family 3, {s}"), make_cosymmetry_family3(&op).unwrap()));
    }
    out
}

#[test]
fn sample_is_made_of_cosymmetries() {
    for (name, l) in sample_cosymmetries() {
        assert!(is_cosymmetry(&l).unwrap().pass, "{name}");
    }
}

#[test]
fn noether_property_on_nine_cosymmetries() {
    let sample: Vec<Cosymmetry> = sample_cosymmetries().into_iter().map(|(_, l)| l).collect();
    for t in [DiffFunction::one(), theta(), DiffFunction::zero()] {
        let report = noether_check(&make_h(&t).unwrap(), &sample).unwrap();
        assert!(report.pass, "Θ = {t}");
        assert_eq!(report.entries.len(), 9);
    }
}

// 𝒲̌(ΘÂg + ½Θ′ω¹g) with g = (ÂΩ)/ω¹; equals 𝒲̌(Â(Θg)) for constant Θ.
fn family1_image(t: &DiffFunction, omega: &DiffFunction) -> EvolutionaryField {
    let g = ahat(omega) * w(1).pow(-1);
    make_w(&(t * &ahat(&g) + (d_omega0(t) * w(1) * g).scale(q(1, 2)))).unwrap()
}

#[test]
fn family1_images() {
    for t in [DiffFunction::one(), theta(), DiffFunction::zero()] {
        let h = make_h(&t).unwrap();
        for o in ["1", "w0", "(* w0 w1)", "(* w0 w0 w2)"] {
            let img = h.apply(&make_cosymmetry_family1(&p(o)).unwrap()).unwrap();
            assert!(img.same(&family1_image(&t, &p(o))).unwrap(), "Θ = {t}, Ω = {o}");
            assert!(is_symmetry(&img).unwrap().pass);
        }
    }
    let one = make_h(&DiffFunction::one()).unwrap();
    for o in ["(* w0 w1)", "(* w0 w0 w2)"] {
        let img = one.apply(&make_cosymmetry_family1(&p(o)).unwrap()).unwrap();
        let printed = make_w(&ahat(&(ahat(&p(o)) * w(1).pow(-1)))).unwrap();
        assert!(img.same(&printed).unwrap());
    }
    let img = make_h(&DiffFunction::one())
        .unwrap()
        .apply(&make_cosymmetry_family1(&w(0)).unwrap())
        .unwrap();
    assert!(img.is_zero().unwrap());
}

#[test]
fn family2_images() {
    let h = make_h(&DiffFunction::one()).unwrap();
    let r1 = Atom::r(1, 0);
    for f in ["(exp (* 1/2 (- r1 r2)))", "(exp (- r1 (* 1/4 r2)))", "(exp (* 1/2 (- r2 r1)))"] {
        let phi = p(f);
        let img = h.apply(&make_cosymmetry_family2(&phi).unwrap()).unwrap();
        let bar = diff_partial(&phi, &r1) - phi.scale(q(1, 2));
        assert!(img.same(&make_p(&bar).unwrap()).unwrap(), "Φ = {f}");
    }
    let sym = make_h(&theta()).unwrap();
    let img = sym.apply(&make_cosymmetry_family2(&p("(exp (- r1 (* 1/4 r2)))")).unwrap()).unwrap();
    assert!(img.same(&h.apply(&make_cosymmetry_family2(&p("(exp (- r1 (* 1/4 r2)))")).unwrap()).unwrap()).unwrap());
}

#[test]
fn family3_images() {
    let h = make_h(&theta()).unwrap();
    for s in ["J^1", "Dy^1", "Dz^1", "Dy^1J^1", "Dz^2"] {
        let op = QOperator::cosymmetry_form(GammaSpec::parse(s).unwrap());
        let qq = op.apply_to_q().unwrap();
        let gamma = (tilde_dy(&qq, &ctx()).unwrap() - &qq).scale(q(1, 2));
        let img = h.apply(&make_cosymmetry_family3(&op).unwrap()).unwrap();
        assert!(img.same(&make_r_from_gamma(&gamma).unwrap()).unwrap(), "{s}");
    }
}

#[test]
fn casimirs_are_annihilated() {
    let one = make_h(&DiffFunction::one()).unwrap();
    assert!(casimir_check(&one, &w(0)).unwrap().pass);
    let g2 = Cosymmetry::new([e12(), -e12(), DiffFunction::zero()]).unwrap();
    assert!(one.apply(&g2).unwrap().is_zero().unwrap());
    assert!(make_h(&theta()).unwrap().apply(&g2).unwrap().is_zero().unwrap());

    let inv_sq = make_h(&w(0).pow(-2)).unwrap();
    assert!(casimir_check(&inv_sq, &w(0).pow(2).scale(q(1, 2))).unwrap().pass);
    assert!(!casimir_check(&inv_sq, &w(0).pow(3).scale(q(1, 3))).unwrap().pass);

    let tb = theta_symbol("ThetaBar");
    let t = d_omega0(&tb).pow(-2);
    assert!(casimir_check(&make_h(&t).unwrap(), &tb).unwrap().pass);
    let t = d_omega0(&tb).pow(-1);
    let image = make_h(&t).unwrap().apply(&casimirs(&tb).unwrap()[1]).unwrap();
    assert!(!image.is_zero().unwrap());

    assert!(!casimir_check(&one, &w(0).pow(2)).unwrap().pass);
    let not_casimir = Cosymmetry::new([&e12() * &w(0), -(&e12() * &w(0)), DiffFunction::zero()]).unwrap();
    assert!(!one.apply(&not_casimir).unwrap().is_zero().unwrap());
}

#[test]
fn degenerate_kernel_contains_family1() {
    let h0 = make_h(&DiffFunction::zero()).unwrap();
    for o in ["1", "w0", "(* w0 w1)", "(* w1 w2)"] {
        let img = h0.apply(&make_cosymmetry_family1(&p(o)).unwrap()).unwrap();
        assert!(img.is_zero().unwrap(), "Ω = {o}");
    }
}

#[test]
fn metric_is_flat_and_levi_civita() {
    let t = theta();
    let h = make_h(&t).unwrap();
    let g = metric_of(&h).unwrap();
    let expected = [-e21(), e21(), &t * &e21().pow(2)];
    for i in 0..3 {
        assert!(zero(&(&g.upper()[i] - &expected[i])));
    }
    assert!(is_flat(&g).unwrap());
    assert!(connection_matches(&h).unwrap().pass);
    for t in [DiffFunction::one(), p("(+ 1 (^ w0 2))")] {
        let h = make_h(&t).unwrap();
        assert!(is_flat(&metric_of(&h).unwrap()).unwrap());
        assert!(connection_matches(&h).unwrap().pass);
    }
    let id = Metric::from_lower([DiffFunction::one(), DiffFunction::one(), DiffFunction::one()]).unwrap();
    assert!(is_flat(&id).unwrap());
    assert!(matches!(
        metric_of(&make_h(&DiffFunction::zero()).unwrap()),
        Err(HamiltonianError::DegenerateMetric(_))
    ));
}

#[test]
fn curvature_matches_finite_differences() {
    let g_num = |x: [f64; 3]| [1.0, 1.0, x[0] * x[0] + 1.0];
    let g = Metric::from_lower([DiffFunction::one(), DiffFunction::one(), p("(+ 1 (^ r1 2))")]).unwrap();
    let riem = riemann_curvature(&g);
    assert!(!is_flat(&g).unwrap());

    let h = 1e-3;
    let shift = |x: [f64; 3], i: usize, d: f64| {
        let mut y = x;
        y[i] += d;
        y
    };
    let gamma = |x: [f64; 3]| -> [[[f64; 3]; 3]; 3] {
        let low = g_num(x);
        let dg = |i: usize, k: usize| (g_num(shift(x, k, h))[i] - g_num(shift(x, k, -h))[i]) / (2.0 * h);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let mut s = 0.0;
                    if i == k {
                        s += dg(i, j);
                    }
                    if i == j {
                        s += dg(i, k);
                    }
                    if j == k {
                        s -= dg(j, i);
                    }
                    0.5 * s / low[i]
                })
            })
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let gm = gamma(x);
        let mut point = Point::new();
        for (i, v) in x.iter().enumerate() {
            point.insert(Atom::r(i as u8 + 1, 0), *v);
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let dk = (gamma(shift(x, k, h))[i][l][j] - gamma(shift(x, k, -h))[i][l][j]) / (2.0 * h);
                        let dl = (gamma(shift(x, l, h))[i][k][j] - gamma(shift(x, l, -h))[i][k][j]) / (2.0 * h);
                        let mut r = dk - dl;
                        for m in 0..3 {
                            r += gm[i][k][m] * gm[m][l][j] - gm[i][l][m] * gm[m][k][j];
                        }
                        let s = eval_numeric(&riem[i][j][k][l], &point, &Instantiation::new()).unwrap();
                        assert!((r - s).abs() < 1e-5, "R^{i}_{j}{k}{l}: {r} vs {s}");
                    }
                }
            }
        }
    }
}

#[test]
fn compatibility() {
    let t = theta();
    assert!(compatibility_check(&DiffFunction::one(), &t).unwrap().pass);
    assert!(compatibility_check(&t, &t).unwrap().pass);
    assert!(compatibility_check(&t, &theta_symbol("Theta2")).unwrap().pass);
    assert!(compatibility_check(&p("(^ w0 2)"), &p("(+ w0 3)")).unwrap().pass);
}

#[test]
fn nijenhuis_of_synthetic_operator() {
    let f = p("(+ 1 (^ r1 2))");
    let fp = p("(* 2 r1)");
    let s: Matrix3 = [
        [DiffFunction::one(), DiffFunction::zero(), DiffFunction::zero()],
        [DiffFunction::zero(), DiffFunction::one(), DiffFunction::zero()],
        [DiffFunction::zero(), DiffFunction::zero(), f.clone()],
    ];
    let n = nijenhuis(&s);
    let expected = &fp * &(DiffFunction::one() - &f);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let want = match (i, j, k) {
                    (2, 0, 2) => expected.clone(),
                    (2, 2, 0) => -expected.clone(),
                    _ => DiffFunction::zero(),
                };
                assert!(zero(&(&n[i][j][k] - &want)), "N^{i}_{j}{k} = {}", n[i][j][k]);
            }
        }
    }
}

#[test]
fn hamiltonian_form_grid() {
    let c0 = DiffFunction::atom(Atom::Param(0));
    let grid = [
        (DiffFunction::one(), DiffFunction::zero(), DiffFunction::zero()),
        (DiffFunction::one(), DiffFunction::zero(), p("7")),
        (DiffFunction::one(), DiffFunction::one(), p("(* 1/2 (^ w0 2))")),
        (DiffFunction::one(), c0.clone(), &c0 * &p("(* 1/2 (^ w0 2))") + w(0)),
        (w(0), c0.clone(), (&c0 * &w(0)).scale_int(2)),
        (p("(^ w0 4)"), DiffFunction::zero(), p("(- (^ w0 -1))")),
        (p("(exp (* 2 w0))"), DiffFunction::zero(), p("(- (exp (* -1 w0)))")),
        (theta(), DiffFunction::zero(), DiffFunction::one()),
    ];
    for (t, c, xi) in grid {
        let r = hamiltonian_form_check(&t, &c, &xi).unwrap();
        assert!(r.hamilton.pass, "Θ = {t}, c₀ = {c}, Ξ = {xi}");
    }
    let err = hamiltonian_form_check(&DiffFunction::one(), &DiffFunction::zero(), &p("(^ w0 2)")).unwrap_err();
    assert!(matches!(err, HamiltonianError::ConstraintViolated { hamilton_pass: false, .. }));
    let err = hamiltonian_form_check(&theta(), &DiffFunction::one(), &DiffFunction::one()).unwrap_err();
    assert!(matches!(err, HamiltonianError::ConstraintViolated { hamilton_pass: false, .. }));
}

#[test]
fn printed_density_shape_fails() {
    // Same density with e^{2(r¹−r²)} in the Ξ term.
    let b = DiffFunction::r(1, 0) + DiffFunction::r(2, 0);
    let a = DiffFunction::r(1, 0) - DiffFunction::r(2, 0);
    let dens = |k: i64, s: i64| {
        (b.pow(2) * e12() + (a.clone() + DiffFunction::zero()).scale_int(2) * DiffFunction::exp_r(q(k, 1), q(-k, 1)))
            .scale(q(1, s))
    };
    let h = make_h(&DiffFunction::one()).unwrap();
    let residual = |d: &DiffFunction, m: i64| {
        let grad = jet_calculus::euler_operator(d).unwrap();
        let img = h.operator().apply(&grad, &ctx()).unwrap();
        let res = img
            .into_iter()
            .enumerate()
            .map(|(i, e)| e + (velocity(i as u8 + 1) * DiffFunction::r(i as u8 + 1, 1)).scale_int(m))
            .collect();
        Report::from_residuals(res).unwrap().pass
    };
    assert!(!residual(&dens(2, 1), 2));
    assert!(!residual(&dens(2, 1), 4));
    assert!(!residual(&dens(2, 4), 1));
    assert!(residual(&dens(1, 1), 4));
    assert!(residual(&dens(1, 2), 2));
    assert!(residual(&dens(1, 4), 1));
}

#[test]
fn printed_xi_condition_disagrees_for_nonconstant_theta() {
    // |Θ|^{1/2}Ξ″ + ½Θ′Ξ′ with an explicit square root of Θ.
    let printed = |t: &DiffFunction, root: &DiffFunction, xi: &DiffFunction| {
        let x1 = d_omega0(xi);
        root * &d_omega0(&x1) + (d_omega0(t) * x1).scale(q(1, 2))
    };
    for (t, root, xi) in [
        (p("(^ w0 4)"), p("(^ w0 2)"), p("(- (^ w0 -1))")),
        (p("(exp (* 2 w0))"), p("(exp w0)"), p("(- (exp (* -1 w0)))")),
    ] {
        assert!(zero(&xi_condition(&t, &DiffFunction::zero(), &xi)));
        assert!(!zero(&printed(&t, &root, &xi)));
        assert!(hamiltonian_form_check(&t, &DiffFunction::zero(), &xi).unwrap().hamilton.pass);
    }
    // (ΘΞ′)′ = c₀ is not sufficient either.
    let err = hamiltonian_form_check(&p("(^ w0 2)"), &DiffFunction::zero(), &p("(^ w0 -1)")).unwrap_err();
    assert!(matches!(err, HamiltonianError::ConstraintViolated { hamilton_pass: false, .. }));
}

#[test]
fn printed_f33_is_not_skew() {
    for t in [theta(), w(0), p("(^ w0 2)")] {
        let mut op = make_h(&t).unwrap().operator().clone();
        let extra = DiffFunction::exp_r(q(-2, 1), q(2, 1)) * d_omega0(&t) * DiffFunction::r(3, 1);
        let fixed = op.get(2, 2).add(&DiffOp::mul(extra.scale(q(1, 2))));
        op.set(2, 2, fixed);
        assert!(!is_skew_adjoint(&op).unwrap(), "Θ = {t}");
    }
}

fn bracket_pairs() -> Vec<(Cosymmetry, Cosymmetry)> {
    let f1 = |s: &str| make_cosymmetry_family1(&p(s)).unwrap();
    let f2 = |s: &str| make_cosymmetry_family2(&p(s)).unwrap();
    let f3 = |s: &str| make_cosymmetry_family3(&QOperator::cosymmetry_form(GammaSpec::parse(s).unwrap())).unwrap();
    vec![
        (f2("(exp (* 1/2 (- r1 r2)))"), f2("(exp (- r1 (* 1/4 r2)))")),
        (f2("(exp (- r1 (* 1/4 r2)))"), Cosymmetry::new([e12(), -e12(), DiffFunction::zero()]).unwrap()),
        (f1("(* 1/2 (^ w0 2))"), f1("(^ w0 3)")),
        (f1("(* w0 w1)"), f2("(exp (- r1 (* 1/4 r2)))")),
        (f1("(^ w0 2)"), f3("J^1")),
        (f3("J^1"), f3("Dy^1")),
    ]
}

#[test]
fn bracket_of_equal_cosymmetries_vanishes() {
    let h = make_h(&DiffFunction::one()).unwrap();
    for (g, _) in bracket_pairs() {
        let b = cosym_bracket(&g, &g, &h).unwrap();
        assert!(Report::from_residuals(b.lambda.to_vec()).unwrap().pass);
    }
}

#[test]
fn bracket_is_a_homomorphism() {
    for t in [DiffFunction::one(), theta()] {
        let h = make_h(&t).unwrap();
        for (g1, g2) in bracket_pairs() {
            assert!(homomorphism_check(&g1, &g2, &h).unwrap().pass, "Θ = {t}: {g1} / {g2}");
        }
    }
    let h = make_h(&DiffFunction::one()).unwrap();
    let (g1, g2) = bracket_pairs().remove(1);
    assert!(h.apply(&cosym_bracket(&g1, &g2, &h).unwrap()).unwrap().is_zero().unwrap());
}

#[test]
fn hamiltonian_symmetries() {
    let one = DiffFunction::one();
    assert!(make_hamiltonian_symmetry_w(&one, &w(0)).unwrap().is_zero().unwrap());
    let f = make_hamiltonian_symmetry_w(&one, &p("(* 1/2 (^ w0 2))")).unwrap();
    assert!(f.same(&make_w(&w(1)).unwrap()).unwrap());
    let f = make_hamiltonian_symmetry_w(&w(0), &w(1)).unwrap();
    assert!(f.is_zero().unwrap());
    for (t, o) in [(w(0), p("(* w0 w1)")), (theta(), p("(* w0 w0 w1)")), (theta(), p("(^ w1 2)"))] {
        let f = make_hamiltonian_symmetry_w(&t, &o).unwrap();
        assert!(is_symmetry(&f).unwrap().pass, "Θ = {t}, Ω = {o}");
        let ch = make_characteristic_family1(&o).unwrap();
        assert!(f.same(&make_h(&t).unwrap().apply(&ch).unwrap()).unwrap());
    }
}
