use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Bit budget for exact powers; anything larger stays symbolic.
const MAX_POW_BITS: u64 = 4096;
const TRIAL_DIVISION_LIMIT: u32 = 10_000;

/// `q^n` if the result stays within the bit budget.
pub(crate) fn rat_pow(q: &Rational, n: &BigInt) -> Option<Rational> {
    let n = n.to_i64()?;
    if n == 0 {
        return Some(Rational::one());
    }
    if q.is_zero() {
        return if n > 0 { Some(Rational::zero()) } else { None };
    }
    let bits = q.numer().bits().max(q.denom().bits()).max(1);
    if bits.saturating_mul(n.unsigned_abs()) > MAX_POW_BITS {
        return None;
    }
    let base = if n < 0 { q.recip() } else { q.clone() };
    Some(num_traits::pow(base, n.unsigned_abs() as usize))
}

/// Writes a nonnegative integer as `outside^2 * inside` with `inside`
/// square-free as far as trial division (plus a final perfect-square check)
/// can tell.
pub(crate) fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.sign() != Sign::Minus);
    if n.is_zero() || n.is_one() {
        return (n.clone(), BigInt::one());
    }
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut rest = n.clone();
    let mut p: u32 = 2;
    while p <= TRIAL_DIVISION_LIMIT {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut count = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            count += 1;
        }
        for _ in 0..count / 2 {
            outside *= &bp;
        }
        if count % 2 == 1 {
            inside *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        outside *= root;
    } else {
        inside *= rest;
    }
    (outside, inside)
}

/// `sqrt(q) = outside * sqrt(inside)` with `inside` a square-free positive
/// integer, for `q >= 0`.
pub(crate) fn sqrt_rational(q: &Rational) -> (Rational, BigInt) {
    // sqrt(p/d) = sqrt(p*d)/d
    let prod = q.numer() * q.denom();
    let (out, inside) = split_square(&prod.abs());
    (
        Rational::new(out, q.denom().clone()),
        inside,
    )
}

/// `q^(a/n)` when `q` is a perfect `n`-th power; `frac` must lie in (0, 1).
pub(crate) fn exact_root(q: &Rational, frac: &Rational) -> Option<Rational> {
    if frac.is_zero() {
        return None;
    }
    let n: u32 = frac.denom().try_into().ok().filter(|n| *n <= 64)?;
    let root = |v: &BigInt| {
        let r = v.nth_root(n);
        (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
    };
    let base = Rational::new(root(q.numer())?, root(q.denom())?);
    rat_pow(&base, frac.numer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_parts() {
        assert_eq!(split_square(&BigInt::from(120)), (BigInt::from(2), BigInt::from(30)));
        assert_eq!(split_square(&BigInt::from(49)), (BigInt::from(7), BigInt::from(1)));
        assert_eq!(split_square(&BigInt::from(2)), (BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn rational_roots() {
        assert_eq!(sqrt_rational(&r(9, 4)), (r(3, 2), BigInt::from(1)));
        assert_eq!(sqrt_rational(&r(1, 2)), (r(1, 2), BigInt::from(2)));
    }

    #[test]
    fn bounded_power() {
        assert_eq!(rat_pow(&r(2, 3), &BigInt::from(-2)), Some(r(9, 4)));
        assert_eq!(rat_pow(&r(0, 1), &BigInt::from(-1)), None);
        assert_eq!(rat_pow(&r(10, 1), &BigInt::from(100_000)), None);
    }

    #[test]
    fn perfect_roots() {
        assert_eq!(exact_root(&r(8, 27), &r(1, 3)), Some(r(2, 3)));
        assert_eq!(exact_root(&r(16, 1), &r(3, 4)), Some(r(8, 1)));
        assert_eq!(exact_root(&r(2, 1), &r(1, 3)), None);
    }
}
