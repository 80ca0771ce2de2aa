use alloc::string::String;

use num_traits::{ToPrimitive, Zero};

use super::{half, Environment, Expr, Func, Rational, Symbol};

/// Guards against cyclic environments.
const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol {0}")]
    UnboundSymbol(Symbol),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("environment is cyclic or too deep")]
    TooDeep,
}

fn domain(msg: &str) -> EvalError {
    EvalError::DomainError(String::from(msg))
}

/// Evaluates `e` to binary64, resolving symbols through `env` (entries may
/// themselves refer to other bound symbols). Pure and deterministic.
pub fn eval_numeric(e: &Expr, env: &Environment) -> Result<f64, EvalError> {
    let v = eval_at(e, env, 0)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain("non-finite value"))
    }
}

/// [`eval_numeric`] with no bindings.
pub fn eval_ground(e: &Expr) -> Result<f64, EvalError> {
    eval_numeric(e, &Environment::new())
}

fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn radians(degrees: f64) -> f64 {
    let reduced = degrees - 360.0 * libm::floor(degrees / 360.0);
    reduced * core::f64::consts::PI / 180.0
}

fn eval_at(e: &Expr, env: &Environment, depth: usize) -> Result<f64, EvalError> {
    if depth > MAX_DEPTH {
        return Err(EvalError::TooDeep);
    }
    match e {
        Expr::Num(q) => Ok(rat_to_f64(q)),
        Expr::Pi => Ok(core::f64::consts::PI),
        Expr::Sym(s) => match env.get(s) {
            Some(v) => eval_at(v, env, depth + 1),
            None => Err(EvalError::UnboundSymbol(s.clone())),
        },
        Expr::Add(xs) => xs
            .iter()
            .try_fold(0.0, |acc, x| Ok(acc + eval_at(x, env, depth + 1)?)),
        Expr::Mul(xs) => xs
            .iter()
            .try_fold(1.0, |acc, x| Ok(acc * eval_at(x, env, depth + 1)?)),
        Expr::Pow(b, q) => {
            let base = eval_at(b, env, depth + 1)?;
            pow(base, q)
        }
        Expr::Func(f, a) => {
            let x = eval_at(a, env, depth + 1)?;
            apply(*f, x, a)
        }
    }
}

fn pow(base: f64, q: &Rational) -> Result<f64, EvalError> {
    if base == 0.0 && q < &Rational::zero() {
        return Err(domain("division by zero"));
    }
    if q.is_integer() {
        let n = q.to_i32().ok_or_else(|| domain("exponent too large"))?;
        return Ok(libm::pow(base, n as f64));
    }
    if *q == half() {
        if base < 0.0 {
            return Err(domain("square root of a negative number"));
        }
        return Ok(libm::sqrt(base));
    }
    let exp = rat_to_f64(q);
    if base < 0.0 {
        // real odd roots of negatives
        let odd_denominator = (q.denom() % 2u32) != Zero::zero();
        if !odd_denominator {
            return Err(domain("even root of a negative number"));
        }
        let mag = libm::pow(-base, exp);
        let odd_numerator = (q.numer() % 2u32) != Zero::zero();
        return Ok(if odd_numerator { -mag } else { mag });
    }
    Ok(libm::pow(base, exp))
}

fn apply(f: Func, x: f64, arg: &Expr) -> Result<f64, EvalError> {
    const EDGE: f64 = 1e-12;
    match f {
        Func::Sin => Ok(libm::sin(radians(x))),
        Func::Cos => Ok(libm::cos(radians(x))),
        Func::Tan => {
            if let Expr::Num(q) = arg {
                let shifted = (q - Rational::from_integer(90.into())) / Rational::from_integer(180.into());
                if shifted.is_integer() {
                    return Err(domain("tangent of a right angle"));
                }
            }
            let r = radians(x);
            let c = libm::cos(r);
            if libm::fabs(c) < 1e-15 {
                return Err(domain("tangent of a right angle"));
            }
            Ok(libm::sin(r) / c)
        }
        Func::Asin | Func::Acos => {
            if libm::fabs(x) > 1.0 + EDGE {
                return Err(domain("inverse sine/cosine argument outside [-1, 1]"));
            }
            let x = x.clamp(-1.0, 1.0);
            let r = if f == Func::Asin { libm::asin(x) } else { libm::acos(x) };
            Ok(r.to_degrees_const())
        }
        Func::Atan => Ok(libm::atan(x).to_degrees_const()),
    }
}

trait ToDegrees {
    fn to_degrees_const(self) -> f64;
}

impl ToDegrees for f64 {
    fn to_degrees_const(self) -> f64 {
        self * (180.0 / core::f64::consts::PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    #[test]
    fn circle_area() {
        let e = Expr::Pi * Expr::int(7).powi(2);
        let v = eval_ground(&e).unwrap();
        assert!((v - 153.938_040_025_899_86).abs() < 1e-9);
    }

    #[test]
    fn parallelogram_area() {
        let e = Expr::int(120).sqrt() * Expr::int(15);
        let v = eval_ground(&e).unwrap();
        assert!((v - 164.316_767_251_549_8).abs() < 1e-9);
    }

    #[test]
    fn inverse_sine_principal() {
        let raw = Expr::Func(Func::Asin, alloc::boxed::Box::new(Expr::one()));
        assert_eq!(eval_ground(&raw).unwrap(), 90.0);
    }

    #[test]
    fn domain_errors() {
        let neg_root = Expr::Pow(alloc::boxed::Box::new(Expr::int(-4)), half());
        assert!(matches!(eval_ground(&neg_root), Err(EvalError::DomainError(_))));
        let asin2 = Expr::Func(Func::Asin, alloc::boxed::Box::new(Expr::int(2)));
        assert!(matches!(eval_ground(&asin2), Err(EvalError::DomainError(_))));
        let tan90 = Expr::Func(Func::Tan, alloc::boxed::Box::new(Expr::int(270)));
        assert!(matches!(eval_ground(&tan90), Err(EvalError::DomainError(_))));
        let inv0 = Expr::Pow(alloc::boxed::Box::new(Expr::zero()), Rational::from_integer((-1).into()));
        assert!(matches!(eval_ground(&inv0), Err(EvalError::DomainError(_))));
    }

    #[test]
    fn unbound_and_cyclic() {
        let x = Symbol::new("x");
        assert_eq!(
            eval_ground(&Expr::Sym(x.clone())),
            Err(EvalError::UnboundSymbol(x.clone()))
        );
        let mut env = BTreeMap::new();
        env.insert(x.clone(), Expr::Sym(x.clone()) + Expr::one());
        assert_eq!(eval_numeric(&Expr::Sym(x), &env), Err(EvalError::TooDeep));
    }

    #[test]
    fn bit_identical_repeats() {
        let e = Expr::int(49) * Expr::Pi - Expr::rational(147, 2) * Expr::int(3).sqrt();
        let a = eval_ground(&e).unwrap();
        let b = eval_ground(&e).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
