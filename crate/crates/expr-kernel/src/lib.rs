//! Exact symbolic expressions over jet coordinates.
//!
//! A [`DiffFunction`] is always held in normal form: a sum of rational
//! multiples of monomials in atoms, each carrying at most one exponential of
//! a rational-linear form. Function symbols (free, Klein–Gordon constrained,
//! or closed univariate forms such as reciprocals of sums) are atoms with
//! derivative multi-indices, reduced eagerly.

pub mod atom;
pub mod derive;
pub mod eval;
pub mod function;
pub mod gen;
pub mod parse;
pub mod tree;

pub use atom::{Atom, ClosedForm, FnAtom, FunctionSymbol, SymbolRule};
pub use derive::{derive, diff_n, diff_partial};
pub use eval::{equals, eval_numeric, is_zero, Instance, Instantiation, Point, Verdict};
pub use function::{closed, DiffFunction, Monomial};
pub use parse::{parse, parse_atom, parse_tree};
pub use tree::{eval_tree, normalize, to_tree, Expr};

/// Exact rational constants.
pub type Q = num_rational::Ratio<i128>;

/// Rational constant `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n as i128, d as i128)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("expression outside the supported class: {0}")]
    UnsupportedForm(String),
    #[error("denominator vanishes during evaluation: {0}")]
    SingularEvaluation(String),
    #[error("zero test inconclusive: {0}")]
    Inconclusive(String),
    #[error("no value assigned to atom {0}")]
    MissingValue(String),
    #[error("no instantiation for function symbol {0}")]
    MissingInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
}
