//! Infix expression parser shared by parameter bindings and registry
//! formulas.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::expr::{Expr, Func, Rational, Symbol};

const MAX_NESTING: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Parameter values: identifiers are unknowns, no functions or `pi`.
    Param,
    /// Registry formulas: `a`-`d` placeholders, functions and `pi`.
    Formula,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

/// Parses a decimal literal such as `180`, `0.5` or `.25` exactly.
pub(crate) fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if s.contains('.') && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(numer, denom))
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            b'*' if bytes.get(i + 1) == Some(&b'*') => {
                out.push(Tok::Caret);
                i += 2;
            }
            b'*' => {
                out.push(Tok::Star);
                i += 1;
            }
            b'/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            b'^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            b'(' => {
                out.push(Tok::Open);
                i += 1;
            }
            b')' => {
                out.push(Tok::Close);
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lit = &text[start..i];
                let q = parse_decimal(lit).ok_or_else(|| format!("bad number `{lit}`"))?;
                out.push(Tok::Num(q));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Tok::Ident(text[start..i].to_string()));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(format!("unexpected character `{ch}`"));
            }
        }
    }
    Ok(out)
}

/// Unknown names in parameters: one letter, optionally followed by digits,
/// other than the operand letters.
pub(crate) fn is_unknown_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() && !matches!(c, 'N' | 'V' | 'C') => {
            chars.all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    depth: usize,
    mode: Mode,
}

type PResult = Result<Expr, String>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn enter(&mut self) -> Result<(), String> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(String::from("expression nested too deeply"));
        }
        Ok(())
    }

    fn sum(&mut self) -> PResult {
        self.enter()?;
        let mut terms = alloc::vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> PResult {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(String::from("division by zero"));
                    }
                    if self.mode == Mode::Param && d.has_symbols() {
                        return Err(String::from("division by an unknown"));
                    }
                    acc = acc / d;
                }
                // implicit multiplication: `3x`, `2(x + 1)`, `x y` is rejected
                // by the lexer producing one identifier for `xy`
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Open) => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> PResult {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.enter()?;
                let v = -self.unary()?;
                self.depth -= 1;
                Ok(v)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.enter()?;
                let v = self.unary()?;
                self.depth -= 1;
                Ok(v)
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        self.enter()?;
        let exp = self.unary()?;
        self.depth -= 1;
        let Some(q) = exp.as_rational().cloned() else {
            return Err(String::from("exponent must be a number"));
        };
        if self.mode == Mode::Param && (!q.is_integer() || q < Rational::zero()) {
            return Err(String::from("parameter exponents must be nonnegative integers"));
        }
        if q.numer().bits() > 16 || q.denom().bits() > 16 {
            return Err(String::from("exponent too large"));
        }
        if base.is_zero() && q < Rational::zero() {
            return Err(String::from("division by zero"));
        }
        Ok(Expr::pow(base, q))
    }

    fn primary(&mut self) -> PResult {
        match self.bump() {
            Some(Tok::Num(q)) => Ok(Expr::Num(q)),
            Some(Tok::Open) => {
                let inner = self.sum()?;
                match self.bump() {
                    Some(Tok::Close) => Ok(inner),
                    _ => Err(String::from("missing `)`")),
                }
            }
            Some(Tok::Ident(name)) => self.ident(name),
            Some(t) => Err(format!("unexpected {}", describe(&t))),
            None => Err(String::from("unexpected end of expression")),
        }
    }

    fn ident(&mut self, name: String) -> PResult {
        match self.mode {
            Mode::Param => {
                if is_unknown_name(&name) {
                    Ok(Expr::Sym(Symbol::new(name)))
                } else {
                    Err(format!("`{name}` is not an unknown name"))
                }
            }
            Mode::Formula => {
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if matches!(name.as_str(), "a" | "b" | "c" | "d") {
                    return Ok(Expr::Sym(Symbol::new(name)));
                }
                let f = match name.as_str() {
                    "sqrt" => None,
                    other => Some(Func::from_name(other).ok_or_else(|| format!("unknown name `{other}`"))?),
                };
                if self.bump() != Some(Tok::Open) {
                    return Err(format!("`{name}` needs parentheses"));
                }
                let arg = self.sum()?;
                if self.bump() != Some(Tok::Close) {
                    return Err(String::from("missing `)`"));
                }
                Ok(match f {
                    Some(f) => Expr::func(f, arg),
                    None => arg.sqrt(),
                })
            }
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Ident(_) => "name",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::Open => "`(`",
        Tok::Close => "`)`",
    }
}

/// Parses one infix expression.
pub(crate) fn parse_expr(text: &str, mode: Mode) -> Result<Expr, String> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(String::from("empty expression"));
    }
    let mut p = Parser { toks, pos: 0, depth: 0, mode };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(format!("unexpected {} after expression", describe(t)));
    }
    Ok(e)
}

/// Checks the parameter grammar bounds: a polynomial of total degree at most
/// two in at most three unknowns.
pub(crate) fn check_param_polynomial(e: &Expr) -> Result<(), String> {
    let unknowns = e.free_symbols();
    if unknowns.len() > 3 {
        return Err(String::from("more than three unknowns"));
    }
    let expanded = crate::expr::expand(e);
    let terms: &[Expr] = match &expanded {
        Expr::Add(xs) => xs,
        other => core::slice::from_ref(other),
    };
    for term in terms {
        let factors: &[Expr] = match term {
            Expr::Mul(xs) => xs,
            other => core::slice::from_ref(other),
        };
        let mut degree = Rational::zero();
        for f in factors {
            match f {
                Expr::Num(_) => {}
                Expr::Sym(_) => degree += Rational::one(),
                Expr::Pow(b, q) if matches!(**b, Expr::Sym(_)) && q.is_integer() && *q > Rational::zero() => {
                    degree += q.clone()
                }
                _ => return Err(String::from("not a polynomial")),
            }
        }
        if degree > Rational::from_integer(BigInt::from(2)) {
            return Err(String::from("degree above two"));
        }
    }
    Ok(())
}
