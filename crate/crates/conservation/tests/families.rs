use conservation::*;
use expr_kernel::{q, DiffFunction, FunctionSymbol};
use symmetry::{make_p, make_w, GammaSpec};

fn w(k: u32) -> DiffFunction {
    DiffFunction::omega(k)
}

fn half(sign: i64) -> DiffFunction {
    DiffFunction::exp_r(q(sign, 2), q(-sign, 2))
}

fn omega_samples() -> Vec<DiffFunction> {
    let sym = FunctionSymbol::free("Omega", 2);
    vec![
        DiffFunction::one(),
        w(0),
        w(0) * w(0),
        w(1),
        w(0) * w(1),
        w(2) * w(0),
        DiffFunction::apply(&sym, &[0, 0], vec![w(0), w(1)]),
    ]
}

fn phi_samples() -> Vec<DiffFunction> {
    let r = |i| DiffFunction::r(i, 0);
    let sym = FunctionSymbol::klein_gordon("Phi", q(-1, 4));
    vec![
        half(1),
        half(-1),
        (r(1) + r(2)) * half(1),
        DiffFunction::exp_r(q(1, 1), q(-1, 4)),
        DiffFunction::apply(&sym, &[0, 0], vec![r(1), r(2)]),
    ]
}

#[test]
fn cosymmetry_examples() {
    let l = make_cosymmetry_family1(&w(0)).unwrap();
    let e = DiffFunction::exp_r(q(1, 1), q(-1, 1));
    let expected = Cosymmetry::new([&e * &w(0), -(&e * &w(0)), e.clone()]).unwrap();
    assert!(l.same(&expected).unwrap());
    assert!(is_cosymmetry(&l).unwrap().pass);
    assert!(is_cosymmetry(&make_cosymmetry_family2(&half(1)).unwrap()).unwrap().pass);
    let bad = Cosymmetry::new([DiffFunction::one(), DiffFunction::int(-1), DiffFunction::zero()]).unwrap();
    assert!(!is_cosymmetry(&bad).unwrap().pass);
    // (1, 1, 0) is the family-2 cosymmetry with Φ = e^{(r²−r¹)/2}.
    let ones = Cosymmetry::new([DiffFunction::one(), DiffFunction::one(), DiffFunction::zero()]).unwrap();
    assert!(is_cosymmetry(&ones).unwrap().pass);
    assert!(ones.same(&make_cosymmetry_family2(&half(-1)).unwrap()).unwrap());
}

#[test]
fn cosymmetry_families() {
    let mut list = Vec::new();
    for o in omega_samples() {
        list.push(make_cosymmetry_family1(&o).unwrap());
    }
    for p in phi_samples() {
        list.push(make_cosymmetry_family2(&p).unwrap());
    }
    for spec in GammaSpec::all_up_to(2) {
        list.push(make_cosymmetry_family3(&QOperator::cosymmetry_form(spec)).unwrap());
    }
    for (i, r) in check_cosymmetries(&list).into_iter().enumerate() {
        assert!(r.unwrap().pass, "cosymmetry {i}: {}", list[i]);
    }
}

#[test]
fn current_examples() {
    let c = make_current_family1(&DiffFunction::one()).unwrap();
    let e = DiffFunction::exp_r(q(1, 1), q(-1, 1));
    let sum = DiffFunction::r(1, 0) + DiffFunction::r(2, 0);
    assert!(c.same(&ConservedCurrent::new(e.clone(), &sum * &e).unwrap()).unwrap());
    let bad = ConservedCurrent::new(DiffFunction::r(3, 0), DiffFunction::zero()).unwrap();
    assert!(!is_conserved_current(&bad).unwrap().pass);
    let gen = generating_currents().unwrap();
    assert!(make_current_family1(&w(0)).unwrap().same(&gen[0]).unwrap());
    for g in &gen {
        assert!(is_conserved_current(g).unwrap().pass);
    }
}

#[test]
fn physical_laws_match_balance_equations() {
    let laws = physical_laws().unwrap();
    assert_eq!(laws.len(), 5);
    for law in laws {
        let phys = ConservedCurrent::new(law.density.scale(law.ratio), law.flux.scale(law.ratio)).unwrap();
        assert!(law.current.same(&phys).unwrap(), "{}", law.name);
        assert!(is_conserved_current(&law.current).unwrap().pass, "{}", law.name);
    }
}

#[test]
fn family1_pairs() {
    for o in omega_samples() {
        let c = make_current_family1(&o).unwrap();
        let l = make_characteristic_family1(&o).unwrap();
        assert!(is_cosymmetry(&l).unwrap().pass, "{o}");
        assert!(verify_characteristic_identity(&c, &l).unwrap().pass, "{o}");
        assert!(c.characteristic().unwrap().same(&l).unwrap(), "{o}");
    }
    let l = make_characteristic_family1(&DiffFunction::one()).unwrap();
    let e = DiffFunction::exp_r(q(1, 1), q(-1, 1));
    assert!(l.same(&Cosymmetry::new([e.clone(), -e, DiffFunction::zero()]).unwrap()).unwrap());
}

#[test]
fn family2_pairs() {
    for p in phi_samples() {
        let c = make_current_family2(&p).unwrap();
        let l = make_characteristic_family2(&p).unwrap();
        assert!(is_cosymmetry(&l).unwrap().pass, "{p}");
        assert!(verify_characteristic_identity(&c, &l).unwrap().pass, "{p}");
        assert!(c.characteristic().unwrap().same(&l).unwrap(), "{p}");
    }
    let c1 = make_current_family1(&DiffFunction::one()).unwrap();
    let l2 = make_characteristic_family2(&half(1)).unwrap();
    assert!(!verify_characteristic_identity(&c1, &l2).unwrap().pass);
}

#[test]
fn intersection_witness() {
    let c1 = make_current_family1(&DiffFunction::one()).unwrap();
    let c2 = make_current_family2(&-half(1)).unwrap();
    assert!(c2.same(&c1.scale(q(-2, 1))).unwrap());
    let l1 = make_cosymmetry_family1(&DiffFunction::one()).unwrap();
    let l2 = make_cosymmetry_family2(&-half(1)).unwrap();
    assert!(l1.same(&l2).unwrap());
}

#[test]
fn family3_pairs() {
    for spec in [GammaSpec::j_power(1), GammaSpec::dy(1, 0), GammaSpec::dz(1, 0), GammaSpec::dz(1, 2), GammaSpec::dy(2, 1)] {
        let op = QOperator::current_form(spec);
        let c = make_current_family3(&op).unwrap();
        let l = make_characteristic_family3(&op).unwrap();
        assert!(is_cosymmetry(&l).unwrap().pass, "{spec}");
        let paired = l.scale(q(FAMILY3_PAIRING, 1));
        assert!(c.characteristic().unwrap().same(&paired).unwrap(), "{spec}");
        assert!(verify_characteristic_identity(&c, &paired).unwrap().pass, "{spec}");
    }
}

#[test]
fn second_generating_current_is_family3_dz() {
    let gen = generating_currents().unwrap();
    let op = QOperator::current_form(GammaSpec::dz(1, 0));
    let c = make_current_family3(&op).unwrap();
    assert!(c.characteristic().unwrap().same(&gen[1].characteristic().unwrap().scale(q(2, 1))).unwrap());
    let qt = model::q_tilde();
    let dz = model::tilde_dz(&qt, &conservation::ctx()).unwrap();
    let corollary = Cosymmetry::new([&half(1) * &qt, -(&half(1) * &dz), DiffFunction::zero()]).unwrap();
    assert!(gen[1].characteristic().unwrap().same(&corollary).unwrap());
    assert!(make_characteristic_family3(&op).unwrap().same(&corollary.scale(q(-1, 1))).unwrap());
}

#[test]
fn invariant_currents_conserved() {
    for ic in invariant_currents().unwrap() {
        assert!(is_conserved_current(&ic.current).unwrap().pass, "{}", ic.name);
        let l = ic.current.characteristic().unwrap();
        assert!(is_tx_invariant(&l), "{}", ic.name);
        assert!(verify_characteristic_identity(&ic.current, &l).unwrap().pass, "{}", ic.name);
    }
}

#[test]
fn invariant_currents_match_operators() {
    for ic in invariant_currents().unwrap() {
        let l = ic.current.characteristic().unwrap();
        assert!(l.same(&make_characteristic_family3(&ic.op).unwrap()).unwrap(), "{}", ic.name);
        let c3 = make_current_family3(&ic.op).unwrap();
        assert!(c3.equivalent(&ic.current.scale(q(FAMILY3_PAIRING, 1))).unwrap(), "{}", ic.name);
    }
}

#[test]
fn generating_set_reproduces_family1() {
    let gen = generating_currents().unwrap();
    for o in [DiffFunction::one(), w(0), w(0) * w(0), w(1)] {
        let acted = act_symmetry_on_current(&make_w(&o).unwrap(), &gen[0]).unwrap();
        assert!(acted.same(&make_current_family1(&o).unwrap()).unwrap(), "{o}");
    }
    let zero = act_symmetry_on_current(&symmetry::EvolutionaryField::zero(), &gen[0]).unwrap();
    assert!(zero.same(&ConservedCurrent::zero()).unwrap());
    let phi = DiffFunction::apply(&FunctionSymbol::klein_gordon("Phi", q(-1, 4)), &[0, 0], vec![DiffFunction::r(1, 0), DiffFunction::r(2, 0)]);
    let acted = act_symmetry_on_current(&make_p(&phi).unwrap(), &gen[1]).unwrap();
    assert!(is_conserved_current(&acted).unwrap().pass);
}

#[test]
fn invariance_and_order() {
    assert!(is_tx_invariant(&make_characteristic_family1(&w(1)).unwrap()));
    assert!(is_tx_invariant(&make_characteristic_family2(&half(1)).unwrap()));
    let gen = generating_currents().unwrap();
    assert!(!current_is_tx_invariant(&gen[1]).unwrap());
    assert!(current_is_tx_invariant(&gen[0]).unwrap());
    assert!(make_characteristic_family1(&w(2)).unwrap().same(&Cosymmetry::new(Default::default()).unwrap()).unwrap());
    assert_eq!(order_of(&make_characteristic_family1(&(w(1) * w(1))).unwrap()), 2);
    assert_eq!(order_of(&make_characteristic_family2(&half(1)).unwrap()), 0);
}

#[test]
fn even_order_cosymmetries_are_not_characteristics() {
    for (o, expect) in [(w(0), true), (w(1), true), (w(0) * w(1), true), (w(2), false), (w(0) * w(2), false)] {
        let l = make_cosymmetry_family1(&o).unwrap();
        assert!(is_cosymmetry(&l).unwrap().pass, "{o}");
        assert_eq!(is_characteristic(&l).unwrap().pass, expect, "{o}");
    }
}
