use conservation::{generating_currents, make_current_family1, physical_laws, ConservedCurrent};
use expr_kernel::{q, DiffFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solutions::{
    convergence_orders, make_regular, make_singular, make_ultra, sample_on_grid, GridSpec, ImplicitSolution,
    KGSolution, KGTerm, Side, SolutionError, Univariate,
};

fn psi_single() -> KGSolution {
    KGSolution::exp(q(1, 1), q(-1, 4)).unwrap()
}

fn psi_pair() -> KGSolution {
    KGSolution::new(vec![
        KGTerm { coef: q(1, 1), a: q(1, 1), b: q(-1, 4) },
        KGTerm { coef: q(1, 1), a: q(-1, 4), b: q(1, 1) },
    ])
    .unwrap()
}

fn regular() -> ImplicitSolution {
    make_regular(psi_single(), Univariate::tanh()).unwrap()
}

fn singular() -> ImplicitSolution {
    make_singular(Side::R1, 0.0, Univariate::exp(), Univariate::tanh())
}

fn ultra() -> ImplicitSolution {
    make_ultra(0.3, 0.2, Univariate::tanh())
}

fn regular_grid(n: usize) -> GridSpec {
    GridSpec::centered(-0.75, 2.25, 0.1, 0.1, n, n).unwrap()
}

fn singular_grid(n: usize) -> GridSpec {
    GridSpec::centered(0.5, 0.5, 0.2, 0.2, n, n).unwrap()
}

fn ultra_grid(n: usize) -> GridSpec {
    GridSpec::centered(0.0, 0.0, 1.0, 1.0, n, n).unwrap()
}

#[test]
fn klein_gordon_seeds() {
    for psi in [psi_single(), psi_pair()] {
        assert!(psi.satisfies_klein_gordon());
        assert!(psi.is_nondegenerate());
    }
    let e = |a, b| KGSolution::exp(a, b).unwrap();
    assert!(!e(q(1, 2), q(-1, 2)).is_nondegenerate());
    assert!(!e(q(-1, 2), q(1, 2)).is_nondegenerate());
    let deg = e(q(1, 2), q(-1, 2)).with_degenerate(q(3, 1));
    assert!(deg.satisfies_klein_gordon());
    assert!(!deg.is_nondegenerate());
    assert!(matches!(KGSolution::exp(q(1, 1), q(1, 4)), Err(SolutionError::NotKleinGordon(_))));
    assert!(matches!(
        make_regular(e(q(1, 2), q(-1, 2)), Univariate::tanh()),
        Err(SolutionError::DegenerateSeed(_))
    ));
    assert!(make_regular(psi_pair(), Univariate::tanh()).is_ok());
}

#[test]
fn numeric_derivatives_of_seed() {
    let psi = psi_pair().with_degenerate(q(1, 3));
    let h = 1e-4;
    let (r1, r2) = (0.3, -0.2);
    for (m, n) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
        let d1 = (psi.eval(r1 + h, r2, m, n) - psi.eval(r1 - h, r2, m, n)) / (2.0 * h);
        let d2 = (psi.eval(r1, r2 + h, m, n) - psi.eval(r1, r2 - h, m, n)) / (2.0 * h);
        assert!((d1 - psi.eval(r1, r2, m + 1, n)).abs() < 1e-6);
        assert!((d2 - psi.eval(r1, r2, m, n + 1)).abs() < 1e-6);
    }
    let kg = psi.eval(r1, r2, 1, 1) + psi.eval(r1, r2, 0, 0) / 4.0;
    assert!(kg.abs() < 1e-12);
}

#[test]
fn regular_maps_solve_the_hodograph_system() {
    // Along x_{r²} = V¹t_{r²} and x_{r¹} = V²t_{r¹}, and the inverse Jacobian
    // gives r¹ₓ, r²ₓ with rⁱₜ = −Vⁱrⁱₓ.
    let sol = make_regular(psi_pair(), Univariate::tanh()).unwrap();
    for (r1, r2) in [(0.0, 0.0), (0.4, -0.3), (-0.2, 0.5)] {
        let m = sol.regular_maps(r1, r2).unwrap();
        let [[t1, t2], [x1, x2]] = m.jacobian;
        assert!((x2 - (r1 + r2 + 1.0) * t2).abs() < 1e-12);
        assert!((x1 - (r1 + r2 - 1.0) * t1).abs() < 1e-12);
        let h = 1e-5;
        let p = sol.regular_maps(r1 + h, r2).unwrap();
        let n = sol.regular_maps(r1 - h, r2).unwrap();
        assert!(((p.t - n.t) / (2.0 * h) - t1).abs() < 1e-8);
        assert!(((p.x - n.x) / (2.0 * h) - x1).abs() < 1e-8);
    }
    let m = regular().regular_maps(0.0, 0.0).unwrap();
    assert!((m.t + 0.75).abs() < 1e-15 && (m.x - 2.25).abs() < 1e-15);
}

#[test]
fn ultra_is_exact_and_constant_on_characteristics() {
    let sol = make_ultra(0.0, 0.0, Univariate::tanh());
    let spec = GridSpec::centered(0.0, 0.0, 1.0, 1.0, 21, 21).unwrap();
    let f = sample_on_grid(&sol, &spec, [0.0, 0.0]).unwrap();
    for j in 0..21 {
        for i in 0..21 {
            assert_eq!(f.value(2, j, i), spec.x(i).tanh());
            assert_eq!(f.value(0, j, i), 0.0);
        }
    }
    let sol = ultra();
    let spec = GridSpec::new(0.0, 0.0, 0.1, 0.05, 11, 11).unwrap();
    let f = sample_on_grid(&sol, &spec, [0.3, 0.2]).unwrap();
    // x − 0.5t is the same at (j, i) and (j + 1, i + 1).
    for j in 0..10 {
        for i in 0..10 {
            assert!((f.value(2, j, i) - f.value(2, j + 1, i + 1)).abs() <= 1e-15);
        }
    }
    assert_eq!(f.pde_residual()[0].max, 0.0);
    assert_eq!(f.pde_residual()[1].max, 0.0);
}

#[test]
fn singular_family_explicit_form() {
    // r¹ = 0, Θ² = e^{r²}: x = (r² − 1)t + e^{2r²}.
    let sol = singular();
    let spec = singular_grid(21);
    let f = sample_on_grid(&sol, &spec, [0.0, 0.0]).unwrap();
    for j in 0..21 {
        for i in 0..21 {
            let (t, x) = (spec.t(j), spec.x(i));
            let r2 = f.value(1, j, i);
            assert_eq!(f.value(0, j, i), 0.0);
            assert!(((r2 - 1.0) * t + (2.0 * r2).exp() - x).abs() < 1e-12);
            let w = ((-r2).exp() * t - 2.0 * r2.exp()).tanh();
            assert!((f.value(2, j, i) - w).abs() < 1e-12);
        }
    }
}

#[test]
fn newton_certificate_regular() {
    let f = sample_on_grid(&regular(), &regular_grid(41), [0.0, 0.0]).unwrap();
    let c = f.certificate;
    assert!(c.max_residual < 1e-10, "{c:?}");
    assert!(c.max_iterations <= 50);
    assert!(c.max_jump < 10.0 * f.spec.dx);
    assert!(c.min_nondegeneracy.unwrap() > 1e-3, "{c:?}");
    for k in 0..f.spec.len() {
        let (j, i) = (k / f.spec.nx, k % f.spec.nx);
        let m = regular().regular_maps(f.r[0][k], f.r[1][k]).unwrap();
        assert!((m.t - f.spec.t(j)).abs() < 1e-10 && (m.x - f.spec.x(i)).abs() < 1e-10);
    }
}

#[test]
fn far_seed_reports_failure() {
    // A seed whose image lies far from the grid leaves Newton on a distant
    // starting point; either it converges to the branch or an error names
    // the node, but it never returns garbage.
    let spec = regular_grid(11);
    match sample_on_grid(&regular(), &spec, [40.0, -40.0]) {
        Ok(f) => assert!(f.certificate.max_residual < 1e-10),
        Err(e) => assert!(matches!(
            e,
            SolutionError::NewtonDiverged { .. } | SolutionError::JacobianSingular { .. } | SolutionError::BranchJump { .. }
        )),
    }
}

fn orders_for(sol: &ImplicitSolution, grid: fn(usize) -> GridSpec, seed: [f64; 2], currents: &[ConservedCurrent]) {
    let mut pde = vec![Vec::new(); 3];
    let mut cons = vec![Vec::new(); currents.len()];
    for n in [51, 101, 201] {
        let f = sample_on_grid(sol, &grid(n), seed).unwrap();
        assert!(f.certificate.max_residual < 1e-10);
        for (c, norm) in f.pde_residual().iter().enumerate() {
            pde[c].push(norm.max);
        }
        for (c, cur) in currents.iter().enumerate() {
            cons[c].push(f.conservation_residual(cur).unwrap().max);
        }
    }
    let mut checked = 0;
    for errs in pde.iter().chain(cons.iter()) {
        // Exactly conserved on the grid (linear data): nothing to measure.
        if errs.iter().all(|e| *e < 1e-11) {
            continue;
        }
        checked += 1;
        for o in convergence_orders(errs) {
            assert!((o - 2.0).abs() <= 0.3, "orders for {errs:?}: {o}");
        }
    }
    assert!(checked >= 3);
}

fn two_currents() -> Vec<ConservedCurrent> {
    let laws = physical_laws().unwrap();
    let momentum = laws.iter().find(|l| l.name == "mixture momentum").unwrap();
    vec![make_current_family1(&DiffFunction::one()).unwrap(), momentum.current.clone()]
}

#[test]
fn convergence_regular() {
    let mut cur = two_currents();
    cur.push(generating_currents().unwrap()[0].clone());
    orders_for(&regular(), regular_grid, [0.0, 0.0], &cur);
}

#[test]
fn convergence_singular() {
    let mut cur = two_currents();
    cur.push(generating_currents().unwrap()[0].clone());
    orders_for(&singular(), singular_grid, [0.0, 0.0], &cur);
}

#[test]
fn convergence_ultra() {
    let w0sq = DiffFunction::omega(0).pow(2);
    let cur = vec![generating_currents().unwrap()[0].clone(), make_current_family1(&w0sq).unwrap()];
    orders_for(&ultra(), ultra_grid, [0.3, 0.2], &cur);
}

#[test]
fn corrupted_field_is_detected() {
    let mut f = sample_on_grid(&regular(), &regular_grid(101), [0.0, 0.0]).unwrap();
    let clean = f.pde_residual()[2].max;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for v in f.r[2].iter_mut() {
        *v += 1e-3 * rng.gen_range(-1.0..1.0);
    }
    let dirty = f.pde_residual()[2].max;
    assert!(dirty > 100.0 * clean, "{dirty} vs {clean}");
}

#[test]
fn non_current_has_order_one_residual() {
    let f = sample_on_grid(&ultra(), &ultra_grid(101), [0.3, 0.2]).unwrap();
    let bogus = ConservedCurrent::new(DiffFunction::r(3, 0), DiffFunction::zero()).unwrap();
    assert!(f.conservation_residual(&bogus).unwrap().max > 0.1);
    let good = &generating_currents().unwrap()[0];
    assert!(f.conservation_residual(good).unwrap().max < 1e-3);
}

#[test]
fn csv_layout() {
    let spec = GridSpec::new(0.0, 0.0, 0.1, 0.1, 5, 6).unwrap();
    let f = sample_on_grid(&ultra(), &spec, [0.3, 0.2]).unwrap();
    let mut out = Vec::new();
    f.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,r1,r2,r3");
    assert_eq!(lines.len(), 31);
    assert_eq!(lines[1].split(',').count(), 5);
}

#[test]
fn univariate_library() {
    let p = Univariate::poly(&[q(1, 1), q(0, 1), q(-2, 1), q(1, 3)]).unwrap();
    assert!((p.eval(2.0, 0).unwrap() - (1.0 - 8.0 + 8.0 / 3.0)).abs() < 1e-12);
    assert!((p.eval(2.0, 3).unwrap() - 2.0).abs() < 1e-12);
    assert!(Univariate::poly(&[q(1, 1); 5]).is_err());
    let t = Univariate::parse("(tanh s)").unwrap();
    let x: f64 = 0.7;
    assert!((t.eval(x, 1).unwrap() - (1.0 - x.tanh().powi(2))).abs() < 1e-12);
    assert!(Univariate::parse("(+ s r1)").is_err());
    assert!(GridSpec::new(0.0, 0.0, 0.1, 0.1, 4, 10).is_err());
}
