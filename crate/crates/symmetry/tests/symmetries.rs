use std::time::Instant;

use expr_kernel::{q, DiffFunction, FunctionSymbol};
use jet_calculus::ord;
use symmetry::*;

fn w(k: u32) -> DiffFunction {
    DiffFunction::omega(k)
}

fn r(i: u8, k: u32) -> DiffFunction {
    DiffFunction::r(i, k)
}

fn phi_sym() -> DiffFunction {
    let s = FunctionSymbol::klein_gordon("Phi", q(-1, 4));
    DiffFunction::apply(&s, &[0, 0], vec![r(1, 0), r(2, 0)])
}

fn psi_sym() -> DiffFunction {
    let s = FunctionSymbol::klein_gordon("Psi", q(-1, 4));
    DiffFunction::apply(&s, &[0, 0], vec![r(1, 0), r(2, 0)])
}

#[test]
fn simple_verdicts() {
    assert!(is_symmetry(&make_w(&DiffFunction::one()).unwrap()).unwrap().pass);
    assert!(is_symmetry(&make_d().unwrap()).unwrap().pass);
    let bad = EvolutionaryField::new([r(3, 1), DiffFunction::zero(), DiffFunction::zero()]).unwrap();
    let rep = is_symmetry(&bad).unwrap();
    assert!(!rep.pass);
    assert!(!rep.residuals[0].is_zero());
}

#[test]
fn whole_sample_passes() {
    let start = Instant::now();
    let sample = standard_sample(3).unwrap();
    let reports = check_all(&sample.iter().map(|n| n.field.clone()).collect::<Vec<_>>());
    for (n, rep) in sample.iter().zip(reports) {
        let rep = rep.unwrap();
        assert!(rep.pass, "{} fails: {:?}", n.name, rep.residuals);
        assert!(jet_calculus::ord(&n.field.eta[0], jet_calculus::Family::Omega).is_none(), "{}", n.name);
        assert!(jet_calculus::ord(&n.field.eta[1], jet_calculus::Family::Omega).is_none(), "{}", n.name);
    }
    assert!(sample.len() >= 15);
    eprintln!("{} fields in {:?}", sample.len(), start.elapsed());
}

#[test]
fn p_normalizations() {
    let p = make_p(&DiffFunction::exp_r(q(-1, 2), q(1, 2))).unwrap();
    assert!(p.eta[0].is_zero() && p.eta[1].is_zero());
    assert!(p.same(&make_w(&w(1)).unwrap().scale(q(2, 1))).unwrap());
    let px = make_p(&DiffFunction::exp_r(q(1, 2), q(-1, 2))).unwrap();
    let want = EvolutionaryField::new([r(1, 1).scale_int(2), r(2, 1).scale_int(2), r(3, 1).scale_int(2)]).unwrap();
    assert!(px.same(&want).unwrap());
}

#[test]
fn first_order_relations() {
    let d = make_d().unwrap();
    let g1 = make_g1().unwrap();
    let g2 = make_g2();
    let rq = make_r(GammaSpec::j_power(0)).unwrap();
    assert!(rq.same(&d.sub(&g1).scale(q(2, 1))).unwrap());
    let rz = make_r(GammaSpec::dz(1, 0)).unwrap();
    assert!(rz.same(&d.add(&g1).add(&g2).scale(q(2, 1))).unwrap());
    assert!(is_symmetry(&g1).unwrap().pass);
    assert!(is_symmetry(&g2).unwrap().pass);
}

#[test]
fn w_of_omega1_is_explicit() {
    let f = make_w(&w(1)).unwrap();
    let want = EvolutionaryField::new([
        DiffFunction::zero(),
        DiffFunction::zero(),
        DiffFunction::exp_r(q(-1, 1), q(1, 1)) * r(3, 1),
    ])
    .unwrap();
    assert!(f.same(&want).unwrap());
}

#[test]
fn brackets() {
    let b = lie_bracket(&make_w(&w(0)).unwrap(), &make_w(&DiffFunction::one()).unwrap()).unwrap();
    assert!(b.same(&make_w(&DiffFunction::int(-1)).unwrap()).unwrap());
    let pp = lie_bracket(&make_p(&phi_sym()).unwrap(), &make_p(&psi_sym()).unwrap()).unwrap();
    assert!(pp.is_zero().unwrap());
    let wp = lie_bracket(&make_w(&(w(0) * w(1))).unwrap(), &make_p(&phi_sym()).unwrap()).unwrap();
    assert!(wp.is_zero().unwrap());
    let d = make_d().unwrap();
    let dp = lie_bracket(&d, &make_p(&phi_sym()).unwrap()).unwrap();
    assert!(dp.same(&make_p(&phi_sym()).unwrap()).unwrap());
    for spec in [GammaSpec::j_power(1), GammaSpec::dy(1, 0), GammaSpec::dz(1, 1)] {
        let dr = lie_bracket(&d, &make_r(spec).unwrap()).unwrap();
        assert!(dr.is_zero().unwrap(), "{spec}");
    }
}

#[test]
fn omega_bracket_matches_generic_bracket() {
    let pairs = [(w(0), DiffFunction::one()), (w(0) * w(0), w(1)), (w(1) * w(1), w(0) * w(2)), (w(2), w(0) * w(1))];
    for (o1, o2) in pairs {
        let generic = lie_bracket(&make_w(&o1).unwrap(), &make_w(&o2).unwrap()).unwrap();
        assert!(generic.same(&make_w(&omega_bracket(&o1, &o2)).unwrap()).unwrap(), "{o1} {o2}");
    }
}

#[test]
fn brackets_stay_symmetries() {
    let fields = [
        make_d().unwrap(),
        make_w(&(w(0) * w(1))).unwrap(),
        make_w(&w(2)).unwrap(),
        make_p(&phi_sym()).unwrap(),
        make_p(&DiffFunction::exp_r(q(1, 1), q(-1, 4))).unwrap(),
        make_r(GammaSpec::j_power(1)).unwrap(),
        make_r(GammaSpec::dy(1, 0)).unwrap(),
        make_r(GammaSpec::dz(1, 1)).unwrap(),
        make_g1().unwrap(),
    ];
    let pairs = [(0, 1), (0, 5), (1, 2), (1, 3), (3, 4), (5, 6), (6, 7), (2, 5), (4, 7), (8, 6)];
    for (i, j) in pairs {
        let b = lie_bracket(&fields[i], &fields[j]).unwrap();
        assert!(is_symmetry(&b).unwrap().pass, "[{i},{j}]");
    }
}

#[test]
fn jacobi_identity() {
    let a = make_d().unwrap();
    let b = make_w(&w(0)).unwrap();
    let c = make_p(&phi_sym()).unwrap();
    let br = |x: &EvolutionaryField, y: &EvolutionaryField| lie_bracket(x, y).unwrap();
    let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
    assert!(sum.is_zero().unwrap());
    let b = make_w(&(w(0) * w(1))).unwrap();
    let c = make_r(GammaSpec::dy(1, 0)).unwrap();
    let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
    assert!(sum.is_zero().unwrap());
}

#[test]
fn classification() {
    assert_eq!(classify(&make_w(&w(0)).unwrap()).unwrap(), Classification::InI2);
    let common = EvolutionaryField::new([
        DiffFunction::zero(),
        DiffFunction::zero(),
        DiffFunction::exp_r(q(-1, 1), q(1, 1)) * r(3, 1),
    ])
    .unwrap();
    assert_eq!(classify(&common).unwrap(), Classification::InIntersection);
    assert_eq!(classify(&make_d().unwrap()).unwrap(), Classification::Outside);
    assert_eq!(classify(&make_p(&phi_sym()).unwrap()).unwrap(), Classification::InI1);
    assert_eq!(
        classify(&make_p(&DiffFunction::exp_r(q(1, 2), q(-1, 2))).unwrap()).unwrap(),
        Classification::InI1
    );
}

#[test]
fn gamma_specs() {
    assert_eq!(GammaSpec::parse("Dy^1J^1").unwrap(), GammaSpec::dy(1, 1));
    assert_eq!(GammaSpec::parse("J^2").unwrap(), GammaSpec::j_power(2));
    assert_eq!(GammaSpec::parse("Dz^2").unwrap(), GammaSpec::dz(2, 0));
    assert!(GammaSpec::parse("Dy^0").is_err());
    assert!(GammaSpec::parse("Q^1").is_err());
    assert_eq!(GammaSpec::dy(2, 1).to_string(), "Dy^2J^1");
    assert!(matches!(
        GammaSpec::j_power(6).gamma(DEFAULT_ORDER_CAP),
        Err(SymmetryError::BudgetExceeded { .. })
    ));
    assert_eq!(GammaSpec::all_up_to(3).len(), 16);
    let g = GammaSpec::j_power(1).gamma(5).unwrap();
    assert_eq!(ord(&g, jet_calculus::Family::R1), Some(1));
}
