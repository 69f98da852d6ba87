//! Action tables of the recursion operators on the spanning symmetries.

use expr_kernel::{diff_partial, q, Atom, DiffFunction, FunctionSymbol};
use jet_calculus::Report;
use model::{q_tilde, tilde_dy, tilde_dz, TildeWord};
use rayon::prelude::*;
use symmetry::{is_symmetry, make_d, make_g1, make_g2, make_p, make_r_from_gamma, make_w, EvolutionaryField};

use crate::{apply_p, ctx, make_r1, make_r2, make_r3, op_script_a, teshukov, RecursionError, RecursionOperator, Slot};

/// A spanning symmetry together with the parameter it was built from.
#[derive(Clone, Debug)]
pub enum TestField {
    D,
    R(String, DiffFunction),
    P(String, DiffFunction),
    W(String, DiffFunction),
}

impl TestField {
    pub fn name(&self) -> String {
        match self {
            TestField::D => "D".into(),
            TestField::R(n, _) => format!("R({n})"),
            TestField::P(n, _) => format!("P({n})"),
            TestField::W(n, _) => format!("W({n})"),
        }
    }

    pub fn field(&self) -> Result<EvolutionaryField, RecursionError> {
        Ok(match self {
            TestField::D => make_d()?,
            TestField::R(_, g) => make_r_from_gamma(g)?,
            TestField::P(_, p) => make_p(p)?,
            TestField::W(_, o) => make_w(o)?,
        })
    }

    /// `𝒟̌`, `ℛ̌(Γ)` for three `Γ`, `𝒫̌(Φ)` for a concrete and a symbolic
    /// Klein–Gordon `Φ`, `𝒲̌(Ω)` for three concrete and one symbolic `Ω`.
    pub fn table_set() -> Result<Vec<TestField>, RecursionError> {
        let c = ctx();
        let qt = q_tilde();
        Ok(vec![
            TestField::D,
            TestField::R("q".into(), qt.clone()),
            TestField::R("Jq".into(), model::tilde_j(&qt, &c)?),
            TestField::R("Dy q".into(), tilde_dy(&qt, &c)?),
            TestField::P("exp(r1-r2/4)".into(), DiffFunction::exp_r(q(1, 1), q(-1, 4))),
            TestField::P("Phi".into(), symbolic_phi()),
            TestField::W("1".into(), DiffFunction::one()),
            TestField::W("omega0".into(), DiffFunction::omega(0)),
            TestField::W("omega1".into(), DiffFunction::omega(1)),
            TestField::W("Omega".into(), symbolic_omega()),
        ])
    }
}

fn symbolic_phi() -> DiffFunction {
    let s = FunctionSymbol::klein_gordon("Phi", q(-1, 4));
    DiffFunction::apply(&s, &[0, 0], vec![DiffFunction::r(1, 0), DiffFunction::r(2, 0)])
}

fn symbolic_omega() -> DiffFunction {
    let s = FunctionSymbol::free("Omega", 2);
    DiffFunction::apply(&s, &[0, 0], vec![DiffFunction::omega(0), DiffFunction::omega(1)])
}

/// One row of an action table.
#[derive(Clone, Debug)]
pub struct ActionEntry {
    pub operator: String,
    pub field: String,
    pub pass: bool,
    /// Nonzero components of `apply − expected`.
    pub residual: Vec<String>,
}

fn compare(op: &RecursionOperator, f: &TestField, expected: EvolutionaryField) -> Result<ActionEntry, RecursionError> {
    let got = op.apply(&f.field()?)?;
    let diff = got.sub(&expected);
    let pass = got.same(&expected)?;
    let residual = if pass {
        Vec::new()
    } else {
        diff.eta.iter().filter(|e| !e.is_zero()).map(ToString::to_string).collect()
    };
    Ok(ActionEntry {
        operator: op.to_string(),
        field: f.name(),
        pass,
        residual,
    })
}

fn omega_over_w1(o: &DiffFunction) -> Result<DiffFunction, RecursionError> {
    op_script_a(&(o * &DiffFunction::omega(1).pow(-1)))
}

fn teshukov_expected(f: &TestField) -> Result<EvolutionaryField, RecursionError> {
    let c = ctx();
    Ok(match f {
        TestField::D => make_g1()?.scale(q(-2, 1)).sub(&make_g2()).add(&make_w(&DiffFunction::one())?),
        TestField::R(_, g) => make_r_from_gamma(&(tilde_dy(g, &c)? - tilde_dz(g, &c)?).scale(q(1, 2)))?,
        TestField::P(_, p) => make_p(&(diff_partial(p, &Atom::r(1, 0)) + diff_partial(p, &Atom::r(2, 0))))?,
        TestField::W(_, o) => make_w(&omega_over_w1(o)?)?,
    })
}

fn klein_expected(slot: Slot, word: &TildeWord, f: &TestField) -> Result<EvolutionaryField, RecursionError> {
    let c = ctx();
    let tilde = |g: &DiffFunction| match slot {
        Slot::First => tilde_dy(g, &c),
        Slot::Second => tilde_dz(g, &c),
    };
    Ok(match f {
        TestField::D => {
            let seed = match slot {
                Slot::First => q_tilde(),
                Slot::Second => tilde_dz(&q_tilde(), &c)?,
            };
            make_r_from_gamma(&word.apply(&seed, &c)?)?
        }
        TestField::R(_, g) => make_r_from_gamma(&word.apply(&(tilde(g)? + g), &c)?)?,
        TestField::P(_, p) => {
            let inner = match slot {
                Slot::First => p + &diff_partial(p, &Atom::r(1, 0)).scale_int(2),
                Slot::Second => p - &diff_partial(p, &Atom::r(2, 0)).scale_int(2),
            };
            make_p(&word.apply(&inner, &c)?)?
        }
        TestField::W(..) => EvolutionaryField::zero(),
    })
}

fn degenerate_expected(p: &[DiffFunction], f: &TestField) -> Result<EvolutionaryField, RecursionError> {
    Ok(match f {
        TestField::D => make_w(&p[0])?,
        TestField::R(..) | TestField::P(..) => EvolutionaryField::zero(),
        TestField::W(_, o) => make_w(&apply_p(p, &omega_over_w1(o)?)?)?,
    })
}

fn expected(op: &RecursionOperator, f: &TestField) -> Result<EvolutionaryField, RecursionError> {
    match op {
        RecursionOperator::Local(_) => teshukov_expected(f),
        RecursionOperator::Klein { slot, word } => klein_expected(*slot, word, f),
        RecursionOperator::Degenerate { p } => degenerate_expected(p, f),
        RecursionOperator::Nonlocal(_) => Err(RecursionError::Nonlocal),
    }
}

fn run_table(ops: Vec<RecursionOperator>, fields: &[TestField]) -> Result<Vec<ActionEntry>, RecursionError> {
    let pairs: Vec<(&RecursionOperator, &TestField)> = ops.iter().flat_map(|o| fields.iter().map(move |f| (o, f))).collect();
    pairs
        .into_par_iter()
        .map(|(o, f)| compare(o, f, expected(o, f)?))
        .collect()
}

/// `ℜ_T` on the table set.
pub fn teshukov_action_table(fields: &[TestField]) -> Result<Vec<ActionEntry>, RecursionError> {
    run_table(vec![teshukov()?], fields)
}

pub fn r1_action_table(words: &[TildeWord], fields: &[TestField]) -> Result<Vec<ActionEntry>, RecursionError> {
    let ops = words.iter().cloned().map(make_r1).collect::<Result<Vec<_>, _>>()?;
    run_table(ops, fields)
}

pub fn r2_action_table(words: &[TildeWord], fields: &[TestField]) -> Result<Vec<ActionEntry>, RecursionError> {
    let ops = words.iter().cloned().map(make_r2).collect::<Result<Vec<_>, _>>()?;
    run_table(ops, fields)
}

pub fn r3_action_table(ps: &[Vec<DiffFunction>], fields: &[TestField]) -> Result<Vec<ActionEntry>, RecursionError> {
    let ops = ps.iter().cloned().map(make_r3).collect::<Result<Vec<_>, _>>()?;
    run_table(ops, fields)
}

/// Residuals of `ℜ_Tη − (½ℜ₁,₁ − ½ℜ₂,₁ + ℜ₃,₁)η` over the given fields.
pub fn teshukov_decomposition_check(fields: &[TestField]) -> Result<Report, RecursionError> {
    let t = teshukov()?;
    let r1 = make_r1(TildeWord::default())?;
    let r2 = make_r2(TildeWord::default())?;
    let r3 = make_r3(vec![DiffFunction::one()])?;
    let res = fields
        .par_iter()
        .map(|f| {
            let eta = f.field()?;
            let lhs = t.apply(&eta)?;
            let rhs = r1
                .apply(&eta)?
                .scale(q(1, 2))
                .sub(&r2.apply(&eta)?.scale(q(1, 2)))
                .add(&r3.apply(&eta)?);
            Ok(lhs.sub(&rhs).eta.to_vec())
        })
        .collect::<Result<Vec<_>, RecursionError>>()?;
    Ok(Report::from_residuals(res.into_iter().flatten().collect())?)
}

/// For each operator and field, whether the image is a symmetry (or zero).
pub fn sample_closure(
    ops: &[RecursionOperator],
    fields: &[(String, EvolutionaryField)],
) -> Result<Vec<ActionEntry>, RecursionError> {
    let pairs: Vec<_> = ops.iter().flat_map(|o| fields.iter().map(move |f| (o, f))).collect();
    pairs
        .into_par_iter()
        .map(|(o, (name, eta))| {
            let img = o.apply(eta)?;
            let (pass, residual) = if img.is_zero()? {
                (true, Vec::new())
            } else {
                let r = is_symmetry(&img)?;
                let res = if r.pass { Vec::new() } else { r.residuals.iter().map(ToString::to_string).collect() };
                (r.pass, res)
            };
            Ok(ActionEntry {
                operator: o.to_string(),
                field: name.clone(),
                pass,
                residual,
            })
        })
        .collect()
}
