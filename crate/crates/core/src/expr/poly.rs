use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use super::{Expr, Symbol};

/// Largest power of a sum expanded by [`expand`].
const MAX_EXPAND_POWER: i64 = 8;
/// Largest number of terms a distributed product may produce.
const MAX_TERMS: usize = 4096;

/// Distributes products over sums and expands small positive integer powers
/// of sums. Function arguments are expanded too; negative powers are left
/// as denominators.
pub fn expand(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Pi | Expr::Sym(_) => e.clone(),
        Expr::Add(xs) => Expr::add(xs.iter().map(expand).collect()),
        Expr::Mul(xs) => {
            let parts: Vec<Expr> = xs.iter().map(expand).collect();
            distribute(parts)
        }
        Expr::Pow(b, q) => {
            let base = expand(b);
            match q.to_i64() {
                Some(n) if q.is_integer() && (2..=MAX_EXPAND_POWER).contains(&n) => {
                    if matches!(base, Expr::Add(_)) {
                        distribute(core::iter::repeat_n(base, n as usize).collect())
                    } else {
                        Expr::pow(base, q.clone())
                    }
                }
                _ => Expr::pow(base, q.clone()),
            }
        }
        Expr::Func(f, a) => Expr::func(*f, expand(a)),
    }
}

fn terms_of(e: Expr) -> Vec<Expr> {
    match e {
        Expr::Add(xs) => xs,
        other => alloc::vec![other],
    }
}

fn distribute(factors: Vec<Expr>) -> Expr {
    let mut acc: Vec<Expr> = alloc::vec![Expr::one()];
    let mut factors = factors.into_iter();
    while let Some(f) = factors.next() {
        let terms = terms_of(f);
        if acc.len().saturating_mul(terms.len()) > MAX_TERMS {
            // too big to distribute; keep the remaining product folded
            let mut rest = alloc::vec![Expr::add(acc), Expr::add(terms)];
            rest.extend(factors);
            return Expr::mul(rest);
        }
        let mut next = Vec::with_capacity(acc.len() * terms.len());
        for a in &acc {
            for t in &terms {
                next.push(a.clone() * t.clone());
            }
        }
        acc = next;
    }
    Expr::add(acc)
}

/// Coefficients of `e` as a Laurent polynomial in `u` (degree → coefficient).
/// `e` should already be expanded. Returns `None` when `u` occurs anywhere
/// other than as an integer power of itself.
pub fn coefficients(e: &Expr, u: &Symbol) -> Option<BTreeMap<i64, Expr>> {
    let mut out: BTreeMap<i64, Vec<Expr>> = BTreeMap::new();
    let terms: &[Expr] = match e {
        Expr::Add(xs) => xs,
        other => core::slice::from_ref(other),
    };
    for term in terms {
        let factors: &[Expr] = match term {
            Expr::Mul(xs) => xs,
            other => core::slice::from_ref(other),
        };
        let mut degree = 0i64;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Expr::Sym(s) if s == u => degree += 1,
                Expr::Pow(b, q) if matches!(&**b, Expr::Sym(s) if s == u) && q.is_integer() => {
                    degree += q.to_i64()?;
                }
                other if other.contains(u) => return None,
                other => rest.push(other.clone()),
            }
        }
        out.entry(degree).or_default().push(Expr::mul(rest));
    }
    Some(out.into_iter().map(|(k, v)| (k, Expr::add(v))).collect())
}
