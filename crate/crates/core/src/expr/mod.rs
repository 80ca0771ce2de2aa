//! Symbolic expressions over exact rationals, `pi`, radicals and degree-based
//! trigonometric atoms, plus the equation solver built on them.

mod eval;
mod poly;
mod radical;
mod simplify;
mod solve;
mod system;
mod trig;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use eval::{eval_ground, eval_numeric, EvalError};
pub use poly::{coefficients, expand};
pub use solve::{solve_single, Root, RootKind, SolveError};
pub use system::{solve_system, SolveEvent, Solution};

/// Exact rational number.
pub type Rational = num_rational::BigRational;

/// Solved bindings, symbol to expression.
pub type Environment = BTreeMap<Symbol, Expr>;

/// A named unknown: a process variable (`V3`) or a parameter unknown (`x`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol(name.into())
    }

    /// The symbol standing for process operand `V{index}`.
    pub fn process(index: u32) -> Self {
        Symbol(alloc::format!("V{index}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True for `V<digits>` symbols.
    pub fn is_process(&self) -> bool {
        let mut chars = self.0.chars();
        chars.next() == Some('V')
            && self.0.len() > 1
            && chars.all(|c| c.is_ascii_digit())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Trigonometric atoms. Angles are measured in degrees, both as arguments of
/// the forward functions and as results of the inverse ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "asin" => Func::Asin,
            "acos" => Func::Acos,
            "atan" => Func::Atan,
            _ => return None,
        })
    }
}

/// Expression tree.
///
/// The variants are public so raw, unsimplified trees can be built; the
/// arithmetic operators and the `Expr::add`/`mul`/`pow`/`func` constructors
/// always return the canonical (simplified) form. Square roots are
/// `Pow(_, 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Rational),
    Pi,
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Func(Func, Box<Expr>),
}

/// `lhs = rhs`, meaning `lhs - rhs = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Equation { lhs, rhs }
    }

    /// `lhs - rhs`, simplified.
    pub fn residual(&self) -> Expr {
        self.lhs.clone() - self.rhs.clone()
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = self.lhs.free_symbols();
        out.extend(self.rhs.free_symbols());
        out
    }

    pub fn substitute(&self, env: &Environment) -> Equation {
        Equation::new(substitute(&self.lhs, env), substitute(&self.rhs, env))
    }

    /// Multiplies both sides by every symbolic denominator, returning the
    /// cleared equation and the denominators, which must be nonzero for the
    /// original equation to make sense.
    pub fn clear_denominators(&self) -> (Equation, Vec<Expr>) {
        let mut dens: BTreeMap<Expr, Rational> = BTreeMap::new();
        collect_denominators(&self.lhs, &mut dens);
        collect_denominators(&self.rhs, &mut dens);
        if dens.is_empty() {
            return (self.clone(), Vec::new());
        }
        let multiplier = Expr::mul(
            dens.iter()
                .map(|(base, exp)| Expr::pow(base.clone(), exp.clone()))
                .collect(),
        );
        let lhs = expand(&(self.lhs.clone() * multiplier.clone()));
        let rhs = expand(&(self.rhs.clone() * multiplier));
        (Equation::new(lhs, rhs), dens.into_keys().collect())
    }
}

fn collect_denominators(e: &Expr, out: &mut BTreeMap<Expr, Rational>) {
    match e {
        Expr::Add(terms) => terms.iter().for_each(|t| collect_denominators(t, out)),
        Expr::Mul(factors) => factors.iter().for_each(|f| collect_denominators(f, out)),
        Expr::Pow(base, exp) if exp.is_integer() && exp.is_negative() && base.has_symbols() => {
            let need = -exp.clone();
            let slot = out.entry((**base).clone()).or_insert_with(Rational::zero);
            if need > *slot {
                *slot = need;
            }
        }
        _ => {}
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Num(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn sqrt(self) -> Expr {
        Expr::pow(self, half())
    }

    pub fn powi(self, n: i64) -> Expr {
        Expr::pow(self, Rational::from_integer(BigInt::from(n)))
    }

    pub fn sin(self) -> Expr {
        Expr::func(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::func(Func::Cos, self)
    }

    pub fn tan(self) -> Expr {
        Expr::func(Func::Tan, self)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) | Expr::Pi => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Pow(b, _) | Expr::Func(_, b) => b.collect_symbols(out),
        }
    }

    pub fn has_symbols(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Sym(_) => true,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(Expr::has_symbols),
            Expr::Pow(b, _) | Expr::Func(_, b) => b.has_symbols(),
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Sym(t) => t == s,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(|x| x.contains(s)),
            Expr::Pow(b, _) | Expr::Func(_, b) => b.contains(s),
        }
    }

    /// Node count, used to bound work on adversarial input.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Sym(_) => 1,
            Expr::Add(xs) | Expr::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, _) | Expr::Func(_, b) => 1 + b.size(),
        }
    }

    /// Structural replacement of every occurrence of `target` by `with`,
    /// re-simplifying on the way up.
    pub fn replace(&self, target: &Expr, with: &Expr) -> Expr {
        if self == target {
            return with.clone();
        }
        match self {
            Expr::Num(_) | Expr::Pi | Expr::Sym(_) => self.clone(),
            Expr::Add(xs) => Expr::add(xs.iter().map(|x| x.replace(target, with)).collect()),
            Expr::Mul(xs) => Expr::mul(xs.iter().map(|x| x.replace(target, with)).collect()),
            Expr::Pow(b, e) => Expr::pow(b.replace(target, with), e.clone()),
            Expr::Func(f, a) => Expr::func(*f, a.replace(target, with)),
        }
    }
}

pub(crate) fn half() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(2))
}

/// Rebuilds `e` through the canonicalising constructors: constant folding,
/// flattening, like-term collection, radical normalisation and special-angle
/// trigonometry. Idempotent.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Pi | Expr::Sym(_) => e.clone(),
        Expr::Add(xs) => Expr::add(xs.iter().map(simplify).collect()),
        Expr::Mul(xs) => Expr::mul(xs.iter().map(simplify).collect()),
        Expr::Pow(b, q) => Expr::pow(simplify(b), q.clone()),
        Expr::Func(f, a) => Expr::func(*f, simplify(a)),
    }
}

/// Replaces every symbol bound in `env` (one pass, values are not
/// re-substituted) and simplifies. Unbound symbols stay.
pub fn substitute(e: &Expr, env: &Environment) -> Expr {
    if env.is_empty() {
        return simplify(e);
    }
    match e {
        Expr::Num(_) | Expr::Pi => e.clone(),
        Expr::Sym(s) => env.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Add(xs) => Expr::add(xs.iter().map(|x| substitute(x, env)).collect()),
        Expr::Mul(xs) => Expr::mul(xs.iter().map(|x| substitute(x, env)).collect()),
        Expr::Pow(b, q) => Expr::pow(substitute(b, env), q.clone()),
        Expr::Func(f, a) => Expr::func(*f, substitute(a, env)),
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(alloc::vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add(alloc::vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(alloc::vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul(alloc::vec![self, rhs.powi(-1)])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(alloc::vec![Expr::int(-1), self])
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::Sym(s)
    }
}

/// Formats a rational as a terminating decimal when it has one, otherwise as
/// `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut digits = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return alloc::format!("{}/{}", q.numer(), q.denom());
    }
    digits += twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q * Rational::from_integer(scale)).to_integer();
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    while s.len() <= digits {
        s.insert(0, '0');
    }
    s.insert(s.len() - digits, '.');
    if neg {
        s.insert(0, '-');
    }
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Expr::Pi => f.write_str("pi"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::Mul(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    match x {
                        Expr::Num(q) if !q.is_integer() || q.is_negative() => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
            Expr::Pow(b, q) => {
                if *q == half() {
                    write!(f, "sqrt({b})")
                } else if q.is_integer() {
                    write!(f, "{}^{}", Paren(b), q.numer())
                } else {
                    write!(f, "{}^({}/{})", Paren(b), q.numer(), q.denom())
                }
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Paren<'a>(&'a Expr);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr::Mul(_) | Expr::Pow(..) => write!(f, "({})", self.0),
            Expr::Num(q) if !q.is_integer() || q.is_negative() => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}
