use expr_kernel::eval::{sample_coordinate, symbols_of};
use expr_kernel::gen::ExprGen;
use expr_kernel::tree::tree_atoms;
use expr_kernel::{diff_partial, eval_numeric, eval_tree, normalize, q, to_tree, Atom, DiffFunction, Instantiation, KernelError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const CASES: usize = 1000;

fn samples() -> Vec<(expr_kernel::Expr, DiffFunction)> {
    let g = ExprGen::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..CASES)
        .map(|_| loop {
            let t = g.tree(&mut rng, 8);
            match normalize(&t) {
                Ok(n) if n.len() < 400 => break (t, n),
                Ok(_) | Err(KernelError::UnsupportedForm(_)) => continue,
                Err(e) => panic!("{e}"),
            }
        })
        .collect()
}

fn pick(atoms: &BTreeSet<Atom>, rng: &mut ChaCha8Rng) -> Atom {
    let v: Vec<&Atom> = atoms.iter().collect();
    if v.is_empty() {
        Atom::X
    } else {
        v[rng.gen_range(0..v.len())].clone()
    }
}

#[test]
fn normalize_is_idempotent() {
    for (_, n) in samples() {
        assert_eq!(normalize(&to_tree(&n)).unwrap(), n);
    }
}

#[test]
fn mixed_partials_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, n) in samples() {
        let atoms = n.base_atoms();
        let u = pick(&atoms, &mut rng);
        let mut v = pick(&atoms, &mut rng);
        if v == u {
            v = Atom::R(2, 0);
        }
        let uv = diff_partial(&diff_partial(&n, &u), &v);
        let vu = diff_partial(&diff_partial(&n, &v), &u);
        assert_eq!(uv, vu, "{n} in {u}, {v}");
    }
}

#[test]
fn normal_form_evaluates_like_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for (t, n) in samples() {
        let mut inst = Instantiation::new();
        inst.fill_random(&symbols_of(&n), &mut rng);
        let mut atoms = BTreeSet::new();
        tree_atoms(&t, &mut atoms);
        atoms.extend(n.base_atoms());
        let point = atoms.into_iter().map(|a| (a, sample_coordinate(&mut rng))).collect();
        let (Ok(a), Ok(b)) = (eval_tree(&t, &point, &inst), eval_numeric(&n, &point, &inst)) else {
            continue;
        };
        let scale: f64 = n
            .terms()
            .map(|(m, c)| eval_numeric(&DiffFunction::term(*c, m.clone()), &point, &inst).unwrap().abs())
            .sum::<f64>()
            .max(1.0);
        assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b} for {n}");
        checked += 1;
    }
    assert!(checked > CASES * 9 / 10);
}

#[test]
fn differentiation_is_linear() {
    let s = samples();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for w in s.chunks(2) {
        let [(_, e1), (_, e2)] = w else { continue };
        let a = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
        let b = q(rng.gen_range(-5..=5), rng.gen_range(1..=4));
        let mut atoms = e1.base_atoms();
        atoms.extend(e2.base_atoms());
        let v = pick(&atoms, &mut rng);
        let lhs = diff_partial(&(e1.scale(a) + e2.scale(b)), &v);
        let rhs = diff_partial(e1, &v).scale(a) + diff_partial(e2, &v).scale(b);
        assert_eq!(lhs, rhs);
    }
}
