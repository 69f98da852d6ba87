//! Infix notation for command-line expressions, lowered to the prefix grammar
//! of the kernel parser.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := number | atom | name '(' sum (',' sum)* ')' | '(' sum ')'
//! ```
//!
//! `exp`, `tanh` and `recip` are the built-in functions. `kg:Name(a, b)` is a
//! Klein–Gordon constrained symbol; any other `Name(...)` is a free symbol.

use expr_kernel::{parse, DiffFunction, KernelError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, KernelError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push(Tok::Num(s));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_' || d == ':') {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push(Tok::Name(s));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(KernelError::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Lower {
    toks: Vec<Tok>,
    pos: usize,
}

impl Lower {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), KernelError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(KernelError::Parse(format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<String, KernelError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = format!("(+ {acc} {})", self.product()?);
            } else if self.eat('-') {
                acc = format!("(- {acc} {})", self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<String, KernelError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = format!("(* {acc} {})", self.unary()?);
            } else if self.eat('/') {
                acc = format!("(/ {acc} {})", self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<String, KernelError> {
        if self.eat('-') {
            Ok(format!("(- {})", self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<String, KernelError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(format!("(^ {base} {}{n})", if neg { "-" } else { "" }))
            }
            _ => Err(KernelError::Parse("exponent must be an integer".into())),
        }
    }

    fn primary(&mut self) -> Result<String, KernelError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if !self.eat('(') {
                    return Ok(name);
                }
                let mut args = vec![self.sum()?];
                while self.eat(',') {
                    args.push(self.sum()?);
                }
                self.expect(')')?;
                let args = args.join(" ");
                Ok(match name.as_str() {
                    "exp" | "tanh" | "recip" => format!("({name} {args})"),
                    _ => match name.strip_prefix("kg:") {
                        Some(sym) => format!("(kg {sym} {args})"),
                        None => format!("(fn {name} {args})"),
                    },
                })
            }
            t => Err(KernelError::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

/// Rewrites infix text in the prefix grammar.
pub fn to_prefix(src: &str) -> Result<String, KernelError> {
    let mut l = Lower {
        toks: lex(src)?,
        pos: 0,
    };
    let e = l.sum()?;
    if l.pos != l.toks.len() {
        return Err(KernelError::Parse(format!("trailing input in '{src}'")));
    }
    Ok(e)
}

/// Accepts either the prefix grammar or infix notation.
pub fn parse_expr(src: &str) -> Result<DiffFunction, KernelError> {
    match parse(src) {
        Ok(e) => Ok(e),
        Err(prefix_err) => match to_prefix(src) {
            Ok(p) => parse(&p),
            Err(_) => Err(prefix_err),
        },
    }
}
