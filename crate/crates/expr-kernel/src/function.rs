//! Normal-form expressions: sums of rational multiples of monomials with a
//! single exponential-linear factor.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::atom::{Atom, ClosedForm, FnAtom, FunctionSymbol};
use crate::Q;

/// A product of atom powers times `exp(Σ cᵢ aᵢ)`.
///
/// Both vectors are sorted by atom and never contain zero exponents or
/// coefficients. Function-symbol atoms never appear inside the exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(Atom, i32)>,
    exp: Vec<(Atom, Q)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp.is_empty()
    }

    pub fn atom(a: Atom, power: i32) -> Monomial {
        if power == 0 {
            return Monomial::one();
        }
        Monomial {
            factors: vec![(a, power)],
            exp: Vec::new(),
        }
    }

    /// `exp(Σ c a)` from an unsorted linear form.
    pub fn exponential(form: &[(Atom, Q)]) -> Monomial {
        let mut exp: Vec<(Atom, Q)> = Vec::new();
        for (a, c) in form {
            assert!(!a.is_fn(), "function symbols cannot enter an exponent");
            exp.push((a.clone(), *c));
        }
        exp.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Atom, Q)> = Vec::with_capacity(exp.len());
        for (a, c) in exp {
            match merged.last_mut() {
                Some((b, d)) if *b == a => *d += c,
                _ => merged.push((a, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Monomial {
            factors: Vec::new(),
            exp: merged,
        }
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.factors
    }

    pub fn exp(&self) -> &[(Atom, Q)] {
        &self.exp
    }

    pub fn power_of(&self, a: &Atom) -> i32 {
        self.factors
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn exp_coefficient(&self, a: &Atom) -> Q {
        self.exp
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.exp[i].1)
            .unwrap_or_else(|_| Q::zero())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            factors: merge(&self.factors, &other.factors),
            exp: merge(&self.exp, &other.exp),
        }
    }

    pub fn pow(&self, n: i32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial {
            factors: self.factors.iter().map(|(a, p)| (a.clone(), p * n)).collect(),
            exp: self
                .exp
                .iter()
                .map(|(a, c)| (a.clone(), c * Q::from_integer(n as i128)))
                .collect(),
        }
    }

    /// The monomial with the power of `a` shifted by `delta`.
    pub fn shifted(&self, a: &Atom, delta: i32) -> Monomial {
        let mut m = self.clone();
        match m.factors.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => {
                m.factors[i].1 += delta;
                if m.factors[i].1 == 0 {
                    m.factors.remove(i);
                }
            }
            Err(i) => {
                if delta != 0 {
                    m.factors.insert(i, (a.clone(), delta));
                }
            }
        }
        m
    }

    pub fn without_exp(&self) -> Monomial {
        Monomial {
            factors: self.factors.clone(),
            exp: Vec::new(),
        }
    }

    pub fn exp_part(&self) -> Monomial {
        Monomial {
            factors: Vec::new(),
            exp: self.exp.clone(),
        }
    }
}

fn merge<V>(a: &[(Atom, V)], b: &[(Atom, V)]) -> Vec<(Atom, V)>
where
    V: Copy + Add<Output = V> + Zero,
{
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = a[i].1 + b[j].1;
                if !v.is_zero() {
                    out.push((a[i].0.clone(), v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// An exact expression in normal form.
///
/// Terms are kept in a sorted map from monomial to nonzero coefficient, so two
/// values are equal exactly when their normal forms coincide.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffFunction {
    terms: BTreeMap<Monomial, Q>,
}

impl DiffFunction {
    pub fn zero() -> DiffFunction {
        DiffFunction::default()
    }

    pub fn one() -> DiffFunction {
        DiffFunction::constant(Q::one())
    }

    pub fn constant(c: Q) -> DiffFunction {
        DiffFunction::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> DiffFunction {
        DiffFunction::constant(Q::from_integer(n as i128))
    }

    pub fn rational(n: i64, d: i64) -> DiffFunction {
        DiffFunction::constant(Q::new(n as i128, d as i128))
    }

    pub fn term(c: Q, m: Monomial) -> DiffFunction {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffFunction { terms }
    }

    pub fn atom(a: Atom) -> DiffFunction {
        DiffFunction::term(Q::one(), Monomial::atom(a, 1))
    }

    pub fn t() -> DiffFunction {
        DiffFunction::atom(Atom::T)
    }

    pub fn x() -> DiffFunction {
        DiffFunction::atom(Atom::X)
    }

    /// Restricted jet `rⁱ_κ`.
    pub fn r(i: u8, k: u32) -> DiffFunction {
        DiffFunction::atom(Atom::R(i, k))
    }

    /// Modified coordinate `ω^κ`.
    pub fn omega(k: u32) -> DiffFunction {
        DiffFunction::atom(Atom::omega(k))
    }

    pub fn mixed(i: u8, a: u32, b: u32) -> DiffFunction {
        DiffFunction::atom(Atom::mixed(i, a, b))
    }

    /// `exp(Σ c a)`.
    pub fn exp_linear(form: &[(Atom, Q)]) -> DiffFunction {
        DiffFunction::term(Q::one(), Monomial::exponential(form))
    }

    /// `exp(a·𝔯¹ + b·𝔯²)` at jet order zero.
    pub fn exp_r(a: Q, b: Q) -> DiffFunction {
        DiffFunction::exp_linear(&[(Atom::R(1, 0), a), (Atom::R(2, 0), b)])
    }

    /// `f_{index}(args)` for a function symbol.
    pub fn apply(symbol: &Arc<FunctionSymbol>, index: &[u32], args: Vec<DiffFunction>) -> DiffFunction {
        if let Some(form) = symbol.closed_form() {
            return closed(form, &args[0]);
        }
        let (c, atom) = FnAtom::reduced(symbol.clone(), index.to_vec(), args.into());
        DiffFunction::term(c, Monomial::atom(Atom::Fn(atom), 1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// The constant value if the expression has no atoms.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(*c)
            }
            _ => None,
        }
    }

    /// The single term, if there is exactly one.
    pub fn as_term(&self) -> Option<(&Monomial, &Q)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    pub fn scale(&self, c: Q) -> DiffFunction {
        if c.is_zero() {
            return DiffFunction::zero();
        }
        DiffFunction {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> DiffFunction {
        self.scale(Q::from_integer(n as i128))
    }

    pub fn mul_monomial(&self, c: Q, m: &Monomial) -> DiffFunction {
        let mut out = DiffFunction::zero();
        out.add_product_term(self, c, m);
        out
    }

    /// `self += c · m · e`.
    pub fn add_product_term(&mut self, e: &DiffFunction, c: Q, m: &Monomial) {
        if c.is_zero() {
            return;
        }
        for (m2, c2) in &e.terms {
            self.add_term(m.mul(m2), c * c2);
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c · e`.
    pub fn add_scaled(&mut self, e: &DiffFunction, c: Q) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &e.terms {
            self.add_term(m.clone(), c * d);
        }
    }

    /// Integer power; negative powers of multi-term expressions become the
    /// closed reciprocal symbol.
    pub fn pow(&self, n: i32) -> DiffFunction {
        if n >= 0 {
            let mut acc = DiffFunction::one();
            let mut base = self.clone();
            let mut k = n as u32;
            while k > 0 {
                if k & 1 == 1 {
                    acc = &acc * &base;
                }
                k >>= 1;
                if k > 0 {
                    base = &base * &base;
                }
            }
            return acc;
        }
        self.recip().pow(-n)
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// On the zero expression.
    pub fn recip(&self) -> DiffFunction {
        assert!(!self.is_zero(), "reciprocal of zero");
        if let Some((m, c)) = self.as_term() {
            return DiffFunction::term(c.recip(), m.pow(-1));
        }
        // Normalize the leading coefficient so that S and c·S share one symbol.
        let lead = *self.terms.iter().next_back().unwrap().1;
        let s = self.scale(lead.recip());
        let (f, atom) = FnAtom::reduced(FunctionSymbol::closed(ClosedForm::Recip), vec![0], vec![s].into());
        DiffFunction::term(f * lead.recip(), Monomial::atom(Atom::Fn(atom), 1))
    }

    /// All atoms, including those nested inside function arguments.
    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out, true);
        out
    }

    /// Atoms appearing at top level (function atoms themselves, not their arguments).
    pub fn top_atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out, false);
        out
    }

    fn collect_atoms(&self, out: &mut std::collections::BTreeSet<Atom>, nested: bool) {
        for m in self.terms.keys() {
            for (a, _) in &m.factors {
                if let (Atom::Fn(f), true) = (a, nested) {
                    for arg in f.args().iter() {
                        arg.collect_atoms(out, nested);
                    }
                }
                out.insert(a.clone());
            }
            for (a, _) in &m.exp {
                out.insert(a.clone());
            }
        }
    }

    /// Base (non-symbol) atoms, including those nested in arguments.
    pub fn base_atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.atoms().into_iter().filter(|a| !a.is_fn()).collect()
    }

    /// Function-symbol atoms, including nested ones.
    pub fn fn_atoms(&self) -> Vec<FnAtom> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Fn(f) => Some(f),
                _ => None,
            })
            .collect()
    }

    pub fn depends_on(&self, a: &Atom) -> bool {
        self.atoms().contains(a)
    }

    /// Whether any function symbol (of any kind) occurs.
    pub fn has_symbols(&self) -> bool {
        self.atoms().iter().any(Atom::is_fn)
    }

    /// Whether a closed symbol (reciprocal of a sum, tanh) occurs.
    pub fn has_closed_symbols(&self) -> bool {
        self.fn_atoms().iter().any(|f| f.symbol().closed_form().is_some())
    }

    /// Replace every base atom by its image; function arguments are rewritten
    /// recursively and exponent atoms must map to linear forms.
    pub fn substitute<F>(&self, image: &mut F) -> Result<DiffFunction, crate::KernelError>
    where
        F: FnMut(&Atom) -> Option<DiffFunction>,
    {
        let mut memo: BTreeMap<Atom, DiffFunction> = BTreeMap::new();
        self.substitute_memo(image, &mut memo)
    }

    fn substitute_memo<F>(
        &self,
        image: &mut F,
        memo: &mut BTreeMap<Atom, DiffFunction>,
    ) -> Result<DiffFunction, crate::KernelError>
    where
        F: FnMut(&Atom) -> Option<DiffFunction>,
    {
        let mut out = DiffFunction::zero();
        for (m, c) in &self.terms {
            let mut acc = DiffFunction::constant(*c);
            let mut kept = Monomial::one();
            for (a, p) in &m.factors {
                let img = atom_image(a, image, memo)?;
                match img {
                    None => kept = kept.mul(&Monomial::atom(a.clone(), *p)),
                    Some(e) => acc = &acc * &e.pow(*p),
                }
            }
            let mut lin: Vec<(Atom, Q)> = Vec::new();
            let mut lin_expr = DiffFunction::zero();
            let mut changed = false;
            for (a, k) in &m.exp {
                match atom_image(a, image, memo)? {
                    None => lin.push((a.clone(), *k)),
                    Some(e) => {
                        changed = true;
                        lin_expr.add_scaled(&e, *k);
                    }
                }
            }
            if changed {
                for (lm, lc) in &lin_expr.terms {
                    match lm.factors.as_slice() {
                        [(a, 1)] if lm.exp.is_empty() && !a.is_fn() => lin.push((a.clone(), *lc)),
                        _ => {
                            return Err(crate::KernelError::UnsupportedForm(format!(
                                "exponent becomes nonlinear under substitution: {lin_expr}"
                            )))
                        }
                    }
                }
            }
            kept = kept.mul(&Monomial::exponential(&lin));
            out.add_product_term(&acc, Q::one(), &kept);
        }
        Ok(out)
    }

    /// Value of the leading (largest) term's coefficient.
    pub fn leading_coefficient(&self) -> Option<Q> {
        self.terms.iter().next_back().map(|(_, c)| *c)
    }

    /// Sum of absolute values of coefficients; a cheap size indicator.
    pub fn coefficient_norm(&self) -> Q {
        self.terms.values().fold(Q::zero(), |acc, c| acc + c.abs())
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter_terms<F: FnMut(&Monomial) -> bool>(&self, mut keep: F) -> DiffFunction {
        DiffFunction {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Splits `self = Σ_m coeff_m · m` by the monomial `key(m)`.
    pub fn collect_by<F: FnMut(&Monomial) -> (Monomial, Monomial)>(
        &self,
        mut key: F,
    ) -> BTreeMap<Monomial, DiffFunction> {
        let mut out: BTreeMap<Monomial, DiffFunction> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (k, rest) = key(m);
            out.entry(k).or_default().add_term(rest, *c);
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

fn atom_image<F>(
    a: &Atom,
    image: &mut F,
    memo: &mut BTreeMap<Atom, DiffFunction>,
) -> Result<Option<DiffFunction>, crate::KernelError>
where
    F: FnMut(&Atom) -> Option<DiffFunction>,
{
    if let Some(e) = memo.get(a) {
        return Ok(Some(e.clone()));
    }
    let img = match a {
        Atom::Fn(f) => {
            let mut changed = false;
            let mut args = Vec::with_capacity(f.args().len());
            for arg in f.args().iter() {
                let new = arg.substitute_memo(image, memo)?;
                changed |= &new != arg;
                args.push(new);
            }
            if !changed {
                None
            } else {
                Some(DiffFunction::apply(f.symbol(), f.index(), args))
            }
        }
        _ => image(a),
    };
    if let Some(e) = &img {
        memo.insert(a.clone(), e.clone());
    }
    Ok(img)
}

/// A closed univariate form applied to an argument, simplified when exact.
pub fn closed(form: ClosedForm, arg: &DiffFunction) -> DiffFunction {
    match form {
        ClosedForm::Recip => arg.recip(),
        ClosedForm::Tanh => {
            if arg.is_zero() {
                return DiffFunction::zero();
            }
            let (c, atom) =
                FnAtom::reduced(FunctionSymbol::closed(ClosedForm::Tanh), vec![0], vec![arg.clone()].into());
            DiffFunction::term(c, Monomial::atom(Atom::Fn(atom), 1))
        }
    }
}

impl From<Q> for DiffFunction {
    fn from(c: Q) -> Self {
        DiffFunction::constant(c)
    }
}

impl From<i64> for DiffFunction {
    fn from(n: i64) -> Self {
        DiffFunction::int(n)
    }
}

impl From<Atom> for DiffFunction {
    fn from(a: Atom) -> Self {
        DiffFunction::atom(a)
    }
}

impl Add<&DiffFunction> for &DiffFunction {
    type Output = DiffFunction;
    fn add(self, rhs: &DiffFunction) -> DiffFunction {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        out.add_scaled(small, Q::one());
        out
    }
}

impl Sub<&DiffFunction> for &DiffFunction {
    type Output = DiffFunction;
    fn sub(self, rhs: &DiffFunction) -> DiffFunction {
        let mut out = self.clone();
        out.add_scaled(rhs, -Q::one());
        out
    }
}

impl Mul<&DiffFunction> for &DiffFunction {
    type Output = DiffFunction;
    fn mul(self, rhs: &DiffFunction) -> DiffFunction {
        let mut out = DiffFunction::zero();
        let (a, b) = if self.len() <= rhs.len() { (self, rhs) } else { (rhs, self) };
        for (m, c) in &a.terms {
            out.add_product_term(b, *c, m);
        }
        out
    }
}

impl Neg for &DiffFunction {
    type Output = DiffFunction;
    fn neg(self) -> DiffFunction {
        self.scale(-Q::one())
    }
}

impl Neg for DiffFunction {
    type Output = DiffFunction;
    fn neg(self) -> DiffFunction {
        self.scale(-Q::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<DiffFunction> for DiffFunction {
            type Output = DiffFunction;
            fn $m(self, rhs: DiffFunction) -> DiffFunction {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DiffFunction> for DiffFunction {
            type Output = DiffFunction;
            fn $m(self, rhs: &DiffFunction) -> DiffFunction {
                (&self).$m(rhs)
            }
        }
        impl $tr<DiffFunction> for &DiffFunction {
            type Output = DiffFunction;
            fn $m(self, rhs: DiffFunction) -> DiffFunction {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&DiffFunction> for DiffFunction {
    fn add_assign(&mut self, rhs: &DiffFunction) {
        self.add_scaled(rhs, Q::one());
    }
}

impl AddAssign<DiffFunction> for DiffFunction {
    fn add_assign(&mut self, rhs: DiffFunction) {
        self.add_scaled(&rhs, Q::one());
    }
}

impl SubAssign<&DiffFunction> for DiffFunction {
    fn sub_assign(&mut self, rhs: &DiffFunction) {
        self.add_scaled(rhs, -Q::one());
    }
}

impl SubAssign<DiffFunction> for DiffFunction {
    fn sub_assign(&mut self, rhs: DiffFunction) {
        self.add_scaled(&rhs, -Q::one());
    }
}

impl std::iter::Sum for DiffFunction {
    fn sum<I: Iterator<Item = DiffFunction>>(iter: I) -> Self {
        let mut acc = DiffFunction::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (a, p) in &self.factors {
            if *p == 1 {
                parts.push(a.to_string());
            } else {
                parts.push(format!("(^ {a} {p})"));
            }
        }
        if !self.exp.is_empty() {
            let lin: Vec<String> = self
                .exp
                .iter()
                .map(|(a, c)| {
                    if c.is_one() {
                        a.to_string()
                    } else {
                        format!("(* {} {a})", fmt_q(c))
                    }
                })
                .collect();
            if lin.len() == 1 {
                parts.push(format!("(exp {})", lin[0]));
            } else {
                parts.push(format!("(exp (+ {}))", lin.join(" ")));
            }
        }
        match parts.len() {
            0 => write!(f, "1"),
            1 => write!(f, "{}", parts[0]),
            _ => write!(f, "(* {})", parts.join(" ")),
        }
    }
}

impl fmt::Display for DiffFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    fmt_q(c)
                } else if c.is_one() {
                    m.to_string()
                } else {
                    let ms = m.to_string();
                    match ms.strip_prefix("(* ") {
                        Some(rest) => format!("(* {} {rest}", fmt_q(c)),
                        None => format!("(* {} {ms})", fmt_q(c)),
                    }
                }
            })
            .collect();
        match parts.len() {
            0 => write!(f, "0"),
            1 => write!(f, "{}", parts[0]),
            _ => write!(f, "(+ {})", parts.join(" ")),
        }
    }
}
