//! Atoms: the variables an expression may depend on.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::function::DiffFunction;
use crate::Q;

/// A coordinate on jet space, or a function symbol applied to arguments.
///
/// The modified coordinate `ω⁰` coincides with `𝔯³` and is always stored as
/// `R(3, 0)`; [`Atom::omega`] performs that identification.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    T,
    X,
    /// Restricted jet `rⁱ_κ` (κ x-derivatives).
    R(u8, u32),
    /// Off-shell jet `rⁱ_(a,b)` with `a ≥ 1` t-derivatives and `b` x-derivatives.
    Mixed(u8, u32, u32),
    /// Modified coordinate `ω^κ` with κ ≥ 1.
    Omega(u32),
    /// Nonlocal variable such as a potential.
    Nonlocal(u32),
    /// Free scalar slot, used for univariate closed forms `W(s)`.
    Param(u32),
    Fn(FnAtom),
}

impl Atom {
    pub fn r(component: u8, order: u32) -> Atom {
        Atom::R(component, order)
    }

    pub fn omega(order: u32) -> Atom {
        if order == 0 {
            Atom::R(3, 0)
        } else {
            Atom::Omega(order)
        }
    }

    /// Off-shell jet; jets without t-derivatives are the restricted `R` atoms.
    pub fn mixed(component: u8, t_order: u32, x_order: u32) -> Atom {
        if t_order == 0 {
            Atom::R(component, x_order)
        } else {
            Atom::Mixed(component, t_order, x_order)
        }
    }

    pub fn is_fn(&self) -> bool {
        matches!(self, Atom::Fn(_))
    }

    /// Modified-coordinate index if this atom is `ω^κ` (including `ω⁰ = 𝔯³`).
    pub fn omega_index(&self) -> Option<u32> {
        match self {
            Atom::R(3, 0) => Some(0),
            Atom::Omega(k) => Some(*k),
            _ => None,
        }
    }
}

/// Derivative-reduction behaviour of a function symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolRule {
    /// No relations among derivatives.
    Free,
    /// Binary symbol with `f_{(a+1,b+1)} = factor · f_{(a,b)}`.
    KleinGordon(Q),
    /// A concrete univariate function whose derivative closes over itself.
    Closed(ClosedForm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClosedForm {
    /// `1/u`, derivative `−f²`.
    Recip,
    /// `tanh u`, derivative `1 − f²`.
    Tanh,
}

impl ClosedForm {
    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::Recip => "recip",
            ClosedForm::Tanh => "tanh",
        }
    }

    pub fn eval(self, u: f64) -> f64 {
        match self {
            ClosedForm::Recip => 1.0 / u,
            ClosedForm::Tanh => u.tanh(),
        }
    }
}

/// A named function symbol. Identity is the name together with the rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionSymbol {
    name: String,
    arity: usize,
    rule: SymbolRule,
    /// Random instantiations of this symbol take positive values only.
    positive: bool,
}

impl FunctionSymbol {
    pub fn free(name: &str, arity: usize) -> Arc<FunctionSymbol> {
        Arc::new(FunctionSymbol {
            name: name.to_string(),
            arity,
            rule: SymbolRule::Free,
            positive: false,
        })
    }

    pub fn positive(name: &str, arity: usize) -> Arc<FunctionSymbol> {
        Arc::new(FunctionSymbol {
            name: name.to_string(),
            arity,
            rule: SymbolRule::Free,
            positive: true,
        })
    }

    /// Binary symbol subject to `f_{12} = factor · f`.
    pub fn klein_gordon(name: &str, factor: Q) -> Arc<FunctionSymbol> {
        Arc::new(FunctionSymbol {
            name: name.to_string(),
            arity: 2,
            rule: SymbolRule::KleinGordon(factor),
            positive: false,
        })
    }

    pub fn closed(form: ClosedForm) -> Arc<FunctionSymbol> {
        Arc::new(FunctionSymbol {
            name: form.name().to_string(),
            arity: 1,
            rule: SymbolRule::Closed(form),
            positive: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rule(&self) -> &SymbolRule {
        &self.rule
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        match self.rule {
            SymbolRule::Closed(c) => Some(c),
            _ => None,
        }
    }
}

/// A derivative `f_{index}(args)` of a function symbol.
#[derive(Clone, Debug)]
pub struct FnAtom {
    symbol: Arc<FunctionSymbol>,
    index: Vec<u32>,
    args: Arc<[DiffFunction]>,
}

impl FnAtom {
    /// Builds the derivative atom and applies the symbol's reduction rule.
    ///
    /// Returns the rational factor produced by the reduction.
    pub fn reduced(
        symbol: Arc<FunctionSymbol>,
        mut index: Vec<u32>,
        args: Arc<[DiffFunction]>,
    ) -> (Q, FnAtom) {
        assert_eq!(symbol.arity, args.len(), "arity mismatch for {}", symbol.name);
        if index.is_empty() {
            index = vec![0; symbol.arity];
        }
        assert_eq!(index.len(), symbol.arity);
        let mut factor = Q::from_integer(1);
        match &symbol.rule {
            SymbolRule::KleinGordon(c) => {
                let m = index[0].min(index[1]);
                if m > 0 {
                    index[0] -= m;
                    index[1] -= m;
                    factor = num_traits::Pow::pow(*c, m as i32);
                }
            }
            SymbolRule::Closed(_) => {
                assert!(index.iter().all(|&i| i == 0), "closed forms carry no index");
            }
            SymbolRule::Free => {}
        }
        (
            factor,
            FnAtom {
                symbol,
                index,
                args,
            },
        )
    }

    pub fn symbol(&self) -> &Arc<FunctionSymbol> {
        &self.symbol
    }

    pub fn index(&self) -> &[u32] {
        &self.index
    }

    pub fn args(&self) -> &Arc<[DiffFunction]> {
        &self.args
    }

    /// The derivative atom with index raised in slot `slot`.
    pub fn raised(&self, slot: usize) -> (Q, FnAtom) {
        let mut idx = self.index.clone();
        idx[slot] += 1;
        FnAtom::reduced(self.symbol.clone(), idx, self.args.clone())
    }

    pub fn with_args(&self, args: Arc<[DiffFunction]>) -> FnAtom {
        FnAtom {
            symbol: self.symbol.clone(),
            index: self.index.clone(),
            args,
        }
    }
}

impl PartialEq for FnAtom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FnAtom {}

impl PartialOrd for FnAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FnAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        if !Arc::ptr_eq(&self.symbol, &other.symbol) {
            let c = self.symbol.cmp(&other.symbol);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.index.cmp(&other.index).then_with(|| {
            if Arc::ptr_eq(&self.args, &other.args) {
                Ordering::Equal
            } else {
                self.args.iter().cmp(other.args.iter())
            }
        })
    }
}

impl Hash for FnAtom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.symbol.hash(state);
        self.index.hash(state);
        self.args.hash(state);
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::T => write!(f, "t"),
            Atom::X => write!(f, "x"),
            Atom::R(3, 0) => write!(f, "w0"),
            Atom::R(i, k) => write!(f, "r{i}_{k}"),
            Atom::Mixed(i, a, b) => write!(f, "m{i}_{a}_{b}"),
            Atom::Omega(k) => write!(f, "w{k}"),
            Atom::Nonlocal(k) => write!(f, "Y{k}"),
            Atom::Param(0) => write!(f, "s"),
            Atom::Param(k) => write!(f, "s{k}"),
            Atom::Fn(a) => {
                let sym = &a.symbol;
                let head = match sym.rule {
                    SymbolRule::Free if sym.positive => "pos",
                    SymbolRule::Free => "fn",
                    SymbolRule::KleinGordon(_) => "kg",
                    SymbolRule::Closed(c) => {
                        return write!(f, "({} {})", c.name(), a.args[0]);
                    }
                };
                let derived = a.index.iter().any(|&i| i > 0);
                if derived {
                    write!(f, "(der ")?;
                }
                write!(f, "({head} {}", sym.name)?;
                if let SymbolRule::KleinGordon(c) = sym.rule {
                    if c != Q::new(-1, 4) {
                        write!(f, " :{c}")?;
                    }
                }
                for arg in a.args.iter() {
                    write!(f, " {arg}")?;
                }
                write!(f, ")")?;
                if derived {
                    for i in &a.index {
                        write!(f, " {i}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}
