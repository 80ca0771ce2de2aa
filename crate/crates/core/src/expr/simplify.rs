//! Canonicalising constructors.
//!
//! Canonical form:
//! - `Add`: flat, at least two terms, rational constant first, then terms
//!   sorted with like terms merged.
//! - `Mul`: flat, at least two factors, rational coefficient first (omitted
//!   when 1), numeric square roots merged into one square-free radical.
//! - `Pow`: exponent neither 0 nor 1; numeric bases only for radicals and
//!   powers too large to fold.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::radical::{exact_root, rat_pow, sqrt_rational};
use super::{half, Expr, Rational};

/// Factors whose powers may be merged regardless of exponent.
fn is_positive_constant(e: &Expr) -> bool {
    match e {
        Expr::Num(q) => q.is_positive(),
        Expr::Pi => true,
        Expr::Pow(b, _) => is_positive_constant(b),
        Expr::Mul(xs) => xs.iter().all(is_positive_constant),
        _ => false,
    }
}

impl Expr {
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut like: Vec<(Expr, Rational)> = Vec::new();
        let mut stack = terms;
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t {
                Expr::Num(q) => constant += q,
                Expr::Add(xs) => stack.extend(xs.into_iter().rev()),
                other => {
                    let (c, rest) = split_coefficient(other);
                    if c.is_zero() {
                        continue;
                    }
                    match like.binary_search_by(|(k, _)| k.cmp(&rest)) {
                        Ok(i) => like[i].1 += c,
                        Err(i) => like.insert(i, (rest, c)),
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(like.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::Num(constant));
        }
        for (rest, c) in like {
            if c.is_zero() {
                continue;
            }
            out.push(scale(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut entries: Vec<(Expr, Rational)> = Vec::new();
        let mut stack = factors;
        while let Some(f) = stack.pop() {
            match f {
                Expr::Num(q) => coeff *= q,
                Expr::Mul(xs) => stack.extend(xs),
                Expr::Pow(b, e) => push_entry(&mut entries, *b, e),
                other => push_entry(&mut entries, other, Rational::one()),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        let mut radicand = Rational::one();
        let mut factors: Vec<Expr> = Vec::new();
        for (base, exp) in entries {
            if exp.is_zero() {
                continue;
            }
            match base {
                Expr::Num(p) if p.is_positive() => {
                    let whole = exp.floor();
                    let frac = &exp - &whole;
                    match rat_pow(&p, whole.numer()) {
                        Some(v) => coeff *= v,
                        None => {
                            factors.push(raw_pow(Expr::Num(p), exp));
                            continue;
                        }
                    }
                    if frac == half() {
                        radicand *= &p;
                    } else if let Some(v) = exact_root(&p, &frac) {
                        coeff *= v;
                    } else if !frac.is_zero() {
                        factors.push(raw_pow(Expr::Num(p), frac));
                    }
                }
                Expr::Num(p) if p.is_zero() => {
                    if exp.is_positive() {
                        return Expr::zero();
                    }
                    factors.push(raw_pow(Expr::Num(p), exp));
                }
                Expr::Num(p) => {
                    let folded = if exp.is_integer() { rat_pow(&p, exp.numer()) } else { None };
                    match folded {
                        Some(v) => coeff *= v,
                        None => factors.push(raw_pow(Expr::Num(p), exp)),
                    }
                }
                other => factors.push(raw_pow(other, exp)),
            }
        }
        if !radicand.is_one() {
            let (outside, inside) = sqrt_rational(&radicand);
            coeff *= outside;
            if !inside.is_one() {
                factors.push(raw_pow(Expr::Num(Rational::from_integer(inside)), half()));
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        factors.sort();
        if factors.is_empty() {
            return Expr::Num(coeff);
        }
        if coeff.is_one() && factors.len() == 1 {
            return factors.pop().unwrap();
        }
        if !coeff.is_one() {
            factors.insert(0, Expr::Num(coeff));
        }
        Expr::Mul(factors)
    }

    pub fn pow(base: Expr, exp: Rational) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        match base {
            Expr::Num(_) => Expr::mul(alloc::vec![raw_pow(base, exp)]),
            Expr::Pow(inner, e2) => {
                if exp.is_integer() || !e2.is_integer() || is_positive_constant(&inner) {
                    Expr::pow(*inner, e2 * exp)
                } else {
                    raw_pow(Expr::Pow(inner, e2), exp)
                }
            }
            Expr::Mul(xs) => {
                if exp.is_integer() {
                    return Expr::mul(xs.into_iter().map(|x| Expr::pow(x, exp.clone())).collect());
                }
                let (pos, rest): (Vec<Expr>, Vec<Expr>) =
                    xs.into_iter().partition(is_positive_constant);
                if pos.is_empty() {
                    return raw_pow(Expr::Mul(rest), exp);
                }
                let mut out: Vec<Expr> = pos.into_iter().map(|x| Expr::pow(x, exp.clone())).collect();
                if !rest.is_empty() {
                    out.push(Expr::pow(Expr::mul(rest), exp));
                }
                Expr::mul(out)
            }
            other => raw_pow(other, exp),
        }
    }

    pub fn func(f: super::Func, arg: Expr) -> Expr {
        super::trig::func(f, arg)
    }
}

fn raw_pow(base: Expr, exp: Rational) -> Expr {
    if exp.is_one() {
        base
    } else {
        Expr::Pow(Box::new(base), exp)
    }
}

fn push_entry(entries: &mut Vec<(Expr, Rational)>, base: Expr, exp: Rational) {
    for (b, e) in entries.iter_mut() {
        if *b == base && ((e.is_integer() && exp.is_integer()) || is_positive_constant(b)) {
            *e += exp;
            return;
        }
    }
    entries.push((base, exp));
}

/// Splits a canonical non-numeric term into rational coefficient and rest.
fn split_coefficient(t: Expr) -> (Rational, Expr) {
    match t {
        Expr::Mul(mut xs) => {
            if let Some(Expr::Num(_)) = xs.first() {
                let Expr::Num(c) = xs.remove(0) else { unreachable!() };
                let rest = if xs.len() == 1 { xs.pop().unwrap() } else { Expr::Mul(xs) };
                (c, rest)
            } else {
                (Rational::one(), Expr::Mul(xs))
            }
        }
        other => (Rational::one(), other),
    }
}

fn scale(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Mul(mut xs) => {
            xs.insert(0, Expr::Num(c));
            Expr::Mul(xs)
        }
        other => Expr::Mul(alloc::vec![Expr::Num(c), other]),
    }
}
