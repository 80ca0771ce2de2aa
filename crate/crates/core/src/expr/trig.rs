//! Degree-based trigonometry with exact values at multiples of 30 and 45
//! degrees.

use alloc::boxed::Box;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{eval_ground, Expr, Func, Rational};

fn deg(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `q` reduced into `[0, period)`.
fn reduce(q: &Rational, period: i64) -> Rational {
    let p = deg(period);
    q - (q / &p).floor() * p
}

fn sin_of_multiple(theta: &Rational) -> Option<Expr> {
    let r3 = || Expr::rational(1, 2) * Expr::int(3).sqrt();
    let r2 = || Expr::rational(1, 2) * Expr::int(2).sqrt();
    let k30 = theta / deg(30);
    if k30.is_integer() {
        let k = (k30.to_integer() % BigInt::from(12)).to_u32()?;
        let v = match k {
            0 | 6 => Expr::zero(),
            1 | 5 => Expr::rational(1, 2),
            2 | 4 => r3(),
            3 => Expr::one(),
            7 | 11 => Expr::rational(-1, 2),
            8 | 10 => -r3(),
            _ => Expr::int(-1),
        };
        return Some(v);
    }
    let k45 = theta / deg(45);
    if k45.is_integer() {
        let k = (k45.to_integer() % BigInt::from(8)).to_u32()?;
        let v = match k {
            1 | 3 => r2(),
            _ => -r2(),
        };
        return Some(v);
    }
    None
}

fn forward(f: Func, q: &Rational) -> Expr {
    match f {
        Func::Sin => {
            let t = reduce(q, 360);
            sin_of_multiple(&t).unwrap_or_else(|| raw(f, Expr::Num(t)))
        }
        Func::Cos => {
            let t = reduce(q, 360);
            sin_of_multiple(&reduce(&(&t + deg(90)), 360)).unwrap_or_else(|| raw(f, Expr::Num(t)))
        }
        Func::Tan => {
            let t = reduce(q, 180);
            let s = sin_of_multiple(&t);
            let c = sin_of_multiple(&reduce(&(&t + deg(90)), 360));
            match (s, c) {
                (Some(s), Some(c)) if !c.is_zero() => s / c,
                _ => raw(f, Expr::Num(t)),
            }
        }
        _ => unreachable!(),
    }
}

/// Known `(value, angle)` pairs for the principal inverse of `f`.
fn inverse_table(f: Func) -> alloc::vec::Vec<(Expr, i64)> {
    let r3h = Expr::rational(1, 2) * Expr::int(3).sqrt();
    let r2h = Expr::rational(1, 2) * Expr::int(2).sqrt();
    match f {
        Func::Asin => alloc::vec![
            (Expr::zero(), 0),
            (Expr::rational(1, 2), 30),
            (r2h.clone(), 45),
            (r3h.clone(), 60),
            (Expr::one(), 90),
            (Expr::rational(-1, 2), -30),
            (-r2h, -45),
            (-r3h, -60),
            (Expr::int(-1), -90),
        ],
        Func::Acos => alloc::vec![
            (Expr::one(), 0),
            (r3h.clone(), 30),
            (r2h.clone(), 45),
            (Expr::rational(1, 2), 60),
            (Expr::zero(), 90),
            (Expr::rational(-1, 2), 120),
            (-r2h, 135),
            (-r3h, 150),
            (Expr::int(-1), 180),
        ],
        Func::Atan => {
            let r3 = Expr::int(3).sqrt();
            let r3t = Expr::rational(1, 3) * Expr::int(3).sqrt();
            alloc::vec![
                (Expr::zero(), 0),
                (r3t.clone(), 30),
                (Expr::one(), 45),
                (r3.clone(), 60),
                (-r3t, -30),
                (Expr::int(-1), -45),
                (-r3, -60),
            ]
        }
        _ => alloc::vec::Vec::new(),
    }
}

fn raw(f: Func, arg: Expr) -> Expr {
    Expr::Func(f, Box::new(arg))
}

fn within_unit(v: &Expr) -> bool {
    matches!(eval_ground(v), Ok(x) if libm::fabs(x) <= 1.0)
}

pub(crate) fn func(f: Func, arg: Expr) -> Expr {
    match f {
        Func::Sin | Func::Cos | Func::Tan => {
            if let Expr::Num(q) = &arg {
                return forward(f, q);
            }
            if let Expr::Func(inner, v) = &arg {
                let undo = matches!(
                    (f, inner),
                    (Func::Sin, Func::Asin) | (Func::Cos, Func::Acos) | (Func::Tan, Func::Atan)
                );
                if undo && (f == Func::Tan || within_unit(v)) {
                    return (**v).clone();
                }
            }
            raw(f, arg)
        }
        Func::Asin | Func::Acos | Func::Atan => {
            if let Some((_, angle)) = inverse_table(f).into_iter().find(|(v, _)| *v == arg) {
                return Expr::int(angle);
            }
            if let Expr::Func(inner, theta) = &arg {
                if let Expr::Num(q) = &**theta {
                    let inside = match (f, inner) {
                        (Func::Asin, Func::Sin) => *q >= deg(-90) && *q <= deg(90),
                        (Func::Acos, Func::Cos) => !q.is_negative() && *q <= deg(180),
                        (Func::Atan, Func::Tan) => *q > deg(-90) && *q < deg(90),
                        _ => false,
                    };
                    if inside {
                        return Expr::Num(q.clone());
                    }
                }
            }
            raw(f, arg)
        }
    }
}
