//! Parenthesized prefix syntax for expressions.
//!
//! The grammar is documented in `docs/expression-grammar.md` at the workspace
//! root; [`DiffFunction`]'s `Display` emits the same syntax.

use crate::atom::{Atom, ClosedForm, FunctionSymbol};
use crate::function::DiffFunction;
use crate::tree::{normalize, Expr};
use crate::{KernelError, Q};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(src: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut word = String::new();
    for ch in src.chars() {
        match ch {
            '(' | ')' => {
                if !word.is_empty() {
                    out.push(Token::Word(std::mem::take(&mut word)));
                }
                out.push(if ch == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => {
                if !word.is_empty() {
                    out.push(Token::Word(std::mem::take(&mut word)));
                }
            }
            c => word.push(c),
        }
    }
    if !word.is_empty() {
        out.push(Token::Word(word));
    }
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn err(msg: impl Into<String>) -> KernelError {
    KernelError::Parse(msg.into())
}

impl Parser {
    fn next(&mut self) -> Result<Token, KernelError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn word(&mut self) -> Result<String, KernelError> {
        match self.next()? {
            Token::Word(w) => Ok(w),
            t => Err(err(format!("expected a word, found {t:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, KernelError> {
        match self.next()? {
            Token::Word(w) => word_expr(&w),
            Token::Close => Err(err("unexpected ')'")),
            Token::Open => {
                let head = self.word()?;
                let e = self.compound(&head)?;
                match self.next()? {
                    Token::Close => Ok(e),
                    t => Err(err(format!("expected ')' after ({head} ...), found {t:?}"))),
                }
            }
        }
    }

    fn rest(&mut self) -> Result<Vec<Expr>, KernelError> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Some(Token::Close) | None) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn integer(&mut self) -> Result<i64, KernelError> {
        let w = self.word()?;
        w.parse().map_err(|_| err(format!("expected an integer, found {w}")))
    }

    fn compound(&mut self, head: &str) -> Result<Expr, KernelError> {
        match head {
            "+" => Ok(Expr::Sum(self.rest()?)),
            "*" => Ok(Expr::Product(self.rest()?)),
            "-" => {
                let args = self.rest()?;
                match args.len() {
                    0 => Err(err("(-) needs an argument")),
                    1 => Ok(Expr::Product(vec![Expr::num(-1), args[0].clone()])),
                    _ => {
                        let mut parts = vec![args[0].clone()];
                        for a in &args[1..] {
                            parts.push(Expr::Product(vec![Expr::num(-1), a.clone()]));
                        }
                        Ok(Expr::Sum(parts))
                    }
                }
            }
            "/" => {
                let args = self.rest()?;
                if args.len() != 2 {
                    return Err(err("(/ a b) takes two arguments"));
                }
                Ok(Expr::Product(vec![
                    args[0].clone(),
                    Expr::Pow(Box::new(args[1].clone()), -1),
                ]))
            }
            "^" => {
                let base = self.expr()?;
                let n = self.integer()?;
                Ok(Expr::Pow(Box::new(base), n as i32))
            }
            "exp" => Ok(Expr::Exp(Box::new(self.expr()?))),
            "recip" => Ok(Expr::Closed(ClosedForm::Recip, Box::new(self.expr()?))),
            "tanh" => Ok(Expr::Closed(ClosedForm::Tanh, Box::new(self.expr()?))),
            "fn" | "pos" => {
                let name = self.word()?;
                let args = self.rest()?;
                let symbol = if head == "fn" {
                    FunctionSymbol::free(&name, args.len())
                } else {
                    FunctionSymbol::positive(&name, args.len())
                };
                Ok(Expr::Apply {
                    symbol,
                    index: Vec::new(),
                    args,
                })
            }
            "kg" => {
                let name = self.word()?;
                let mut factor = Q::new(-1, 4);
                if let Some(Token::Word(w)) = self.peek() {
                    if let Some(c) = w.strip_prefix(':') {
                        factor = parse_rational(c)?;
                        self.pos += 1;
                    }
                }
                let args = self.rest()?;
                if args.len() != 2 {
                    return Err(err("(kg NAME a b) takes two arguments"));
                }
                Ok(Expr::Apply {
                    symbol: FunctionSymbol::klein_gordon(&name, factor),
                    index: Vec::new(),
                    args,
                })
            }
            "der" => {
                let inner = self.expr()?;
                let mut idx = Vec::new();
                while let Some(Token::Word(_)) = self.peek() {
                    idx.push(self.integer()? as u32);
                }
                match inner {
                    Expr::Apply { symbol, index, args } => {
                        if idx.len() != args.len() {
                            return Err(err("derivative index length must match arity"));
                        }
                        let base: Vec<u32> = if index.is_empty() { vec![0; args.len()] } else { index };
                        let index = base.iter().zip(&idx).map(|(a, b)| a + b).collect();
                        Ok(Expr::Apply { symbol, index, args })
                    }
                    _ => Err(err("(der ...) applies to a function symbol")),
                }
            }
            other => Err(err(format!("unknown head '{other}'"))),
        }
    }
}

fn parse_rational(w: &str) -> Result<Q, KernelError> {
    let bad = || err(format!("bad number '{w}'"));
    match w.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.parse().map_err(|_| bad())?;
            let d: i128 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(w.parse().map_err(|_| bad())?)),
    }
}

/// Parses a single atom name such as `r1_2`, `w3`, `m2_1_0`, `Y0` or `s`.
pub fn parse_atom(w: &str) -> Result<Atom, KernelError> {
    let bad = || err(format!("unknown atom '{w}'"));
    let num = |s: &str| s.parse::<u32>().map_err(|_| bad());
    match w {
        "t" => return Ok(Atom::T),
        "x" => return Ok(Atom::X),
        "s" => return Ok(Atom::Param(0)),
        _ => {}
    }
    let (head, tail) = w.split_at(1);
    match head {
        "r" => {
            let (i, k) = match tail.split_once('_') {
                Some((i, k)) => (num(i)?, num(k)?),
                None => (num(tail)?, 0),
            };
            if !(1..=3).contains(&i) {
                return Err(bad());
            }
            Ok(Atom::R(i as u8, k))
        }
        "w" => Ok(Atom::omega(num(tail)?)),
        "m" => {
            let parts: Vec<&str> = tail.split('_').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let i = num(parts[0])?;
            if !(1..=3).contains(&i) {
                return Err(bad());
            }
            Ok(Atom::mixed(i as u8, num(parts[1])?, num(parts[2])?))
        }
        "Y" => Ok(Atom::Nonlocal(num(tail)?)),
        "s" => Ok(Atom::Param(num(tail)?)),
        _ => Err(bad()),
    }
}

fn word_expr(w: &str) -> Result<Expr, KernelError> {
    let first = w.chars().next().unwrap();
    if first.is_ascii_digit() || (first == '-' && w.len() > 1) {
        return Ok(Expr::Num(parse_rational(w)?));
    }
    Ok(Expr::Atom(parse_atom(w)?))
}

/// Parses text into a tree.
pub fn parse_tree(src: &str) -> Result<Expr, KernelError> {
    let mut p = Parser {
        tokens: tokenize(src),
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(err("trailing input"));
    }
    Ok(e)
}

/// Parses and normalizes.
pub fn parse(src: &str) -> Result<DiffFunction, KernelError> {
    normalize(&parse_tree(src)?)
}
