//! Numeric evaluation, random instantiation of function symbols, and the
//! equality test with its probabilistic fallback.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atom::{Atom, FnAtom, FunctionSymbol, SymbolRule};
use crate::function::DiffFunction;
use crate::KernelError;

/// Smallest denominator magnitude accepted during evaluation.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;

/// Absolute residual tolerance of the probabilistic equality test.
pub const NUMERIC_EQ_TOL: f64 = 1e-9;

/// Number of random points used by the probabilistic equality test.
pub const NUMERIC_EQ_POINTS: usize = 20;

/// Values of base atoms.
pub type Point = BTreeMap<Atom, f64>;

type Custom = Arc<dyn Fn(&[f64], &[u32]) -> f64 + Send + Sync>;

/// A concrete realization of a function symbol, with all derivatives.
#[derive(Clone)]
pub enum Instance {
    /// `Σ cₖ exp(αₖ · args)`; derivatives multiply by powers of `αₖ`.
    ExpSum(Vec<(f64, Vec<f64>)>),
    /// Arbitrary callback receiving argument values and the derivative index.
    Custom(Custom),
}

impl Instance {
    pub fn custom<F>(f: F) -> Instance
    where
        F: Fn(&[f64], &[u32]) -> f64 + Send + Sync + 'static,
    {
        Instance::Custom(Arc::new(f))
    }

    pub fn eval(&self, args: &[f64], index: &[u32]) -> f64 {
        match self {
            Instance::ExpSum(terms) => terms
                .iter()
                .map(|(c, rates)| {
                    let mut v = *c;
                    let mut s = 0.0;
                    for (k, r) in rates.iter().enumerate() {
                        s += r * args[k];
                        v *= r.powi(index.get(k).copied().unwrap_or(0) as i32);
                    }
                    v * s.exp()
                })
                .sum(),
            Instance::Custom(f) => f(args, index),
        }
    }

    /// A random instance consistent with the symbol's rule.
    pub fn random<R: Rng>(symbol: &FunctionSymbol, rng: &mut R) -> Instance {
        let n = 3;
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let c = if symbol.is_positive() {
                rng.gen_range(0.5..1.5)
            } else {
                rng.gen_range(-1.5..1.5)
            };
            let rates = match symbol.rule() {
                SymbolRule::KleinGordon(f) => {
                    let f = f.to_f64().unwrap();
                    let mut a: f64 = rng.gen_range(0.3..1.2);
                    if rng.gen_bool(0.5) {
                        a = -a;
                    }
                    vec![a, f / a]
                }
                _ => (0..symbol.arity()).map(|_| rng.gen_range(-0.8..0.8)).collect(),
            };
            terms.push((c, rates));
        }
        Instance::ExpSum(terms)
    }
}

/// Instances keyed by symbol name.
#[derive(Clone, Default)]
pub struct Instantiation {
    map: BTreeMap<String, Instance>,
}

impl Instantiation {
    pub fn new() -> Instantiation {
        Instantiation::default()
    }

    pub fn with(mut self, name: &str, inst: Instance) -> Instantiation {
        self.map.insert(name.to_string(), inst);
        self
    }

    pub fn insert(&mut self, name: &str, inst: Instance) {
        self.map.insert(name.to_string(), inst);
    }

    pub fn get(&self, name: &str) -> Option<&Instance> {
        self.map.get(name)
    }

    /// Random instances for every non-closed symbol in `symbols` not yet covered.
    pub fn fill_random<R: Rng>(&mut self, symbols: &BTreeSet<Arc<FunctionSymbol>>, rng: &mut R) {
        for s in symbols {
            if s.closed_form().is_none() && !self.map.contains_key(s.name()) {
                self.map.insert(s.name().to_string(), Instance::random(s, rng));
            }
        }
    }
}

/// Evaluates `e` at `point`.
pub fn eval_numeric(e: &DiffFunction, point: &Point, inst: &Instantiation) -> Result<f64, KernelError> {
    let mut cache: BTreeMap<Atom, f64> = BTreeMap::new();
    eval_cached(e, point, inst, &mut cache)
}

fn eval_cached(
    e: &DiffFunction,
    point: &Point,
    inst: &Instantiation,
    cache: &mut BTreeMap<Atom, f64>,
) -> Result<f64, KernelError> {
    let mut total = 0.0;
    for (m, c) in e.terms() {
        let mut v = c.to_f64().unwrap();
        for (a, p) in m.factors() {
            let av = atom_value(a, point, inst, cache)?;
            if *p < 0 && av.abs() < DENOMINATOR_FLOOR {
                return Err(KernelError::SingularEvaluation(a.to_string()));
            }
            v *= av.powi(*p);
        }
        let mut s = 0.0;
        for (a, k) in m.exp() {
            s += k.to_f64().unwrap() * atom_value(a, point, inst, cache)?;
        }
        total += v * s.exp();
    }
    Ok(total)
}

fn atom_value(
    a: &Atom,
    point: &Point,
    inst: &Instantiation,
    cache: &mut BTreeMap<Atom, f64>,
) -> Result<f64, KernelError> {
    if let Some(v) = cache.get(a) {
        return Ok(*v);
    }
    let v = match a {
        Atom::Fn(f) => eval_fn(f, point, inst, cache)?,
        _ => *point
            .get(a)
            .ok_or_else(|| KernelError::MissingValue(a.to_string()))?,
    };
    cache.insert(a.clone(), v);
    Ok(v)
}

fn eval_fn(
    f: &FnAtom,
    point: &Point,
    inst: &Instantiation,
    cache: &mut BTreeMap<Atom, f64>,
) -> Result<f64, KernelError> {
    let mut args = Vec::with_capacity(f.args().len());
    for arg in f.args().iter() {
        args.push(eval_cached(arg, point, inst, cache)?);
    }
    if let Some(form) = f.symbol().closed_form() {
        if form == crate::atom::ClosedForm::Recip && args[0].abs() < DENOMINATOR_FLOOR {
            return Err(KernelError::SingularEvaluation(format!("recip of {}", f.args()[0])));
        }
        return Ok(form.eval(args[0]));
    }
    let i = inst
        .get(f.symbol().name())
        .ok_or_else(|| KernelError::MissingInstance(f.symbol().name().to_string()))?;
    Ok(i.eval(&args, f.index()))
}

/// Every function symbol used by `e`, including nested ones.
pub fn symbols_of(e: &DiffFunction) -> BTreeSet<Arc<FunctionSymbol>> {
    e.fn_atoms().into_iter().map(|f| f.symbol().clone()).collect()
}

/// Samples a value from `[−2,−0.5] ∪ [0.5,2]`.
pub fn sample_coordinate<R: Rng>(rng: &mut R) -> f64 {
    let v: f64 = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// A random point covering every base atom of the given expressions.
pub fn random_point<R: Rng>(exprs: &[&DiffFunction], rng: &mut R) -> Point {
    let mut atoms = BTreeSet::new();
    for e in exprs {
        atoms.extend(e.base_atoms());
    }
    atoms.into_iter().map(|a| (a, sample_coordinate(rng))).collect()
}

/// Outcome of an equality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The normal forms coincide.
    Equal,
    /// Symbolic cancellation was blocked; all random evaluations agreed.
    ProbablyEqual,
    NotEqual,
}

impl Verdict {
    pub fn holds(self) -> bool {
        !matches!(self, Verdict::NotEqual)
    }
}

/// Decides `e = 0`.
///
/// Normal forms are unique except for relations hidden inside closed symbols
/// (reciprocals of sums); only then is the numeric fallback used. Free and
/// Klein–Gordon symbols are algebraically independent in their reduced
/// derivatives, so a nonzero normal form free of closed symbols is nonzero.
pub fn is_zero(e: &DiffFunction, seed: u64) -> Result<Verdict, KernelError> {
    if e.is_zero() {
        return Ok(Verdict::Equal);
    }
    if !e.has_closed_symbols() {
        return Ok(Verdict::NotEqual);
    }
    numeric_zero(e, seed)
}

/// Randomized zero test at [`NUMERIC_EQ_POINTS`] admissible points.
pub fn numeric_zero(e: &DiffFunction, seed: u64) -> Result<Verdict, KernelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = Instantiation::new();
    inst.fill_random(&symbols_of(e), &mut rng);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < NUMERIC_EQ_POINTS {
        attempts += 1;
        if attempts > 50 * NUMERIC_EQ_POINTS {
            return Err(KernelError::Inconclusive(
                "no admissible evaluation points found".to_string(),
            ));
        }
        let point = random_point(&[e], &mut rng);
        match eval_numeric(e, &point, &inst) {
            Ok(v) => {
                if !v.is_finite() {
                    continue;
                }
                accepted += 1;
                if v.abs() > NUMERIC_EQ_TOL {
                    return Ok(Verdict::NotEqual);
                }
            }
            Err(KernelError::SingularEvaluation(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(Verdict::ProbablyEqual)
}

/// Decides `e1 = e2`.
pub fn equals(e1: &DiffFunction, e2: &DiffFunction) -> Result<Verdict, KernelError> {
    is_zero(&(e1 - e2), 0)
}
