//! Closed-form solving of one equation for one unknown.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive};

use super::{coefficients, eval_ground, expand, Equation, Expr, Func, Rational, Symbol};

const MAX_NESTING: usize = 8;
/// Relative size below which a ground coefficient counts as zero.
const NEGLIGIBLE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootKind {
    /// Principal branch (inverse trig on right-triangle ranges) or any
    /// algebraic root.
    Principal,
    /// Supplementary angle, only tried when every principal root is rejected.
    Supplementary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Expr,
    pub kind: RootKind,
}

impl Root {
    fn principal(value: Expr) -> Root {
        Root { value, kind: RootKind::Principal }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("unsupported equation shape: {0}")]
    UnsupportedShape(String),
    #[error("{0} does not occur in the equation")]
    NotPresent(Symbol),
    #[error("equation does not determine {0}")]
    Degenerate(Symbol),
    #[error("no real root")]
    NoRealRoot,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("unsolved system: {0}")]
    UnsolvedSystem(String),
    #[error("ambiguous solution for {0}")]
    AmbiguousSolution(Symbol),
    #[error("inconsistent equation {equation}: residual {residual}")]
    Inconsistent { equation: usize, residual: f64 },
}

fn unsupported(msg: &str) -> SolveError {
    SolveError::UnsupportedShape(String::from(msg))
}

/// All real closed-form roots of `eq` in `unknown`, ascending.
///
/// Handles equations that are (after expansion) linear, quadratic or a pure
/// power in the unknown, and equations where the unknown sits inside a
/// single square root, power or (inverse) trigonometric atom. Inverting a
/// sine returns the principal angle in `(0, 90]` plus the supplementary
/// candidate, tagged [`RootKind::Supplementary`].
pub fn solve_single(eq: &Equation, unknown: &Symbol) -> Result<Vec<Root>, SolveError> {
    let e = expand(&eq.residual());
    if !e.contains(unknown) {
        return Err(SolveError::NotPresent(unknown.clone()));
    }
    let roots = order_roots(solve_zero(&e, unknown, 0)?);
    if roots.is_empty() {
        return Err(SolveError::NoRealRoot);
    }
    Ok(roots)
}

fn order_roots(mut roots: Vec<Root>) -> Vec<Root> {
    let values: Option<Vec<f64>> = roots.iter().map(|r| eval_ground(&r.value).ok()).collect();
    let Some(values) = values else {
        roots.dedup_by(|a, b| a.value == b.value);
        return roots;
    };
    let mut paired: Vec<(f64, Root)> = values.into_iter().zip(roots).collect();
    paired.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.kind.cmp(&b.1.kind)));
    let mut out: Vec<(f64, Root)> = Vec::with_capacity(paired.len());
    for (v, r) in paired {
        if let Some((last, prev)) = out.last() {
            let close = (v - last).abs() <= 1e-12 * v.abs().max(1.0);
            if prev.value == r.value || close {
                continue;
            }
        }
        out.push((v, r));
    }
    out.into_iter().map(|(_, r)| r).collect()
}

fn solve_zero(e: &Expr, u: &Symbol, depth: usize) -> Result<Vec<Root>, SolveError> {
    if depth > MAX_NESTING {
        return Err(unsupported("nesting too deep"));
    }
    if let Some(coeffs) = coefficients(e, u) {
        return solve_polynomial(coeffs, u);
    }
    isolate(e, u, depth)
}

fn negligible(c: &Expr, scale: f64) -> bool {
    if c.is_zero() {
        return true;
    }
    // exact coefficients are never noise
    if c.as_rational().is_some() {
        return false;
    }
    match eval_ground(c) {
        Ok(v) => v.abs() <= NEGLIGIBLE * scale.max(1.0),
        Err(_) => false,
    }
}

fn ground_value(e: &Expr) -> Result<f64, SolveError> {
    eval_ground(e).map_err(|err| match err {
        super::EvalError::DomainError(m) => SolveError::DomainError(m),
        _ => unsupported("coefficient depends on other unknowns"),
    })
}

fn solve_polynomial(coeffs: BTreeMap<i64, Expr>, u: &Symbol) -> Result<Vec<Root>, SolveError> {
    let scale = coeffs
        .values()
        .filter_map(|c| eval_ground(c).ok())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let coeffs: BTreeMap<i64, Expr> =
        coeffs.into_iter().filter(|(_, c)| !negligible(c, scale)).collect();
    let (Some(&kmin), Some(&kmax)) = (coeffs.keys().next(), coeffs.keys().next_back()) else {
        return Err(SolveError::Degenerate(u.clone()));
    };
    let mut roots = Vec::new();
    if kmin > 0 {
        roots.push(Root::principal(Expr::zero()));
    }
    if kmin == kmax {
        // c * u^k = 0
        return Ok(roots);
    }
    let at = |k: i64| coeffs.get(&(k + kmin)).cloned().unwrap_or_else(Expr::zero);
    let degree = kmax - kmin;
    match degree {
        1 => roots.push(Root::principal(-at(0) / at(1))),
        2 => roots.extend(quadratic(at(2), at(1), at(0))?),
        n if coeffs.len() == 2 => roots.extend(pure_power(n, -at(0) / at(n))?),
        _ => return Err(unsupported("polynomial of degree above two")),
    }
    Ok(roots)
}

fn quadratic(a: Expr, b: Expr, c: Expr) -> Result<Vec<Root>, SolveError> {
    let disc = b.clone().powi(2) - Expr::int(4) * a.clone() * c.clone();
    let d = ground_value(&disc)?;
    let bv = ground_value(&b)?;
    let acv = ground_value(&(a.clone() * c))?;
    let tol = 1e-12 * (bv * bv).max((4.0 * acv).abs()).max(1.0);
    let two_a = Expr::int(2) * a;
    if d < -tol {
        return Ok(Vec::new());
    }
    if disc.is_zero() || d.abs() <= tol {
        return Ok(alloc::vec![Root::principal(-b / two_a)]);
    }
    let root = disc.sqrt();
    Ok(alloc::vec![
        Root::principal((-b.clone() - root.clone()) / two_a.clone()),
        Root::principal((-b + root) / two_a),
    ])
}

/// Real roots of `w^n = v`.
fn pure_power(n: i64, v: Expr) -> Result<Vec<Root>, SolveError> {
    if n < 1 {
        return Err(unsupported("negative power"));
    }
    let val = ground_value(&v)?;
    let inv = Rational::new(One::one(), n.into());
    if n % 2 == 0 {
        if val < 0.0 {
            return Ok(Vec::new());
        }
        if v.is_zero() {
            return Ok(alloc::vec![Root::principal(Expr::zero())]);
        }
        let r = Expr::pow(v, inv);
        return Ok(alloc::vec![Root::principal(-r.clone()), Root::principal(r)]);
    }
    let r = if val >= 0.0 { Expr::pow(v, inv) } else { -Expr::pow(-v, inv) };
    Ok(alloc::vec![Root::principal(r)])
}

/// The unknown-bearing atoms of `e` when `u` does not also occur bare.
fn atoms_of(e: &Expr, u: &Symbol) -> Result<BTreeSet<Expr>, SolveError> {
    let mut atoms = BTreeSet::new();
    let terms: &[Expr] = match e {
        Expr::Add(xs) => xs,
        other => core::slice::from_ref(other),
    };
    for term in terms {
        let factors: &[Expr] = match term {
            Expr::Mul(xs) => xs,
            other => core::slice::from_ref(other),
        };
        for f in factors.iter().filter(|f| f.contains(u)) {
            match f {
                Expr::Sym(_) => return Err(unsupported("unknown occurs both bare and inside an atom")),
                Expr::Pow(b, q) if q.is_integer() && !matches!(**b, Expr::Sym(_)) => {
                    atoms.insert((**b).clone());
                }
                Expr::Pow(b, q) if q.is_integer() => {
                    let _ = b;
                    return Err(unsupported("unknown occurs both bare and inside an atom"));
                }
                other => {
                    atoms.insert(other.clone());
                }
            }
        }
    }
    Ok(atoms)
}

fn isolate(e: &Expr, u: &Symbol, depth: usize) -> Result<Vec<Root>, SolveError> {
    let atoms = atoms_of(e, u)?;
    if atoms.len() != 1 {
        return Err(unsupported("unknown occurs in several non-polynomial atoms"));
    }
    let atom = atoms.into_iter().next().unwrap();
    let t = Symbol::new("\u{1}atom");
    let reduced = expand(&e.replace(&atom, &Expr::Sym(t.clone())));
    if reduced.contains(u) {
        return Err(unsupported("unknown occurs outside its atom"));
    }
    let coeffs = coefficients(&reduced, &t).ok_or_else(|| unsupported("atom is not isolable"))?;
    let mut out = Vec::new();
    for r in solve_polynomial(coeffs, &t)? {
        for mut inner in invert(&atom, &r.value, u, depth)? {
            inner.kind = inner.kind.max(r.kind);
            out.push(inner);
        }
    }
    Ok(out)
}

fn deg(n: i64) -> Expr {
    Expr::int(n)
}

/// Solves `atom = value` for `u`.
fn invert(atom: &Expr, value: &Expr, u: &Symbol, depth: usize) -> Result<Vec<Root>, SolveError> {
    const EDGE: f64 = 1e-12;
    let val = ground_value(value)?;
    let v = value.clone();
    let mut targets: Vec<(Expr, RootKind)> = Vec::new();
    let inner: &Expr = match atom {
        Expr::Func(f, g) => {
            match f {
                Func::Sin => {
                    if val.abs() <= 1.0 + EDGE {
                        let theta = Expr::func(Func::Asin, v);
                        if val.abs() < 1.0 - EDGE {
                            targets.push((deg(180) - theta.clone(), RootKind::Supplementary));
                        }
                        targets.push((theta, RootKind::Principal));
                    }
                }
                Func::Cos => {
                    if val.abs() <= 1.0 + EDGE {
                        targets.push((Expr::func(Func::Acos, v), RootKind::Principal));
                    }
                }
                Func::Tan => {
                    let theta = Expr::func(Func::Atan, v);
                    if val < 0.0 {
                        targets.push((theta.clone() + deg(180), RootKind::Supplementary));
                    }
                    targets.push((theta, RootKind::Principal));
                }
                Func::Asin => {
                    if (-90.0 - EDGE..=90.0 + EDGE).contains(&val) {
                        targets.push((v.sin(), RootKind::Principal));
                    }
                }
                Func::Acos => {
                    if (-EDGE..=180.0 + EDGE).contains(&val) {
                        targets.push((v.cos(), RootKind::Principal));
                    }
                }
                Func::Atan => {
                    if val > -90.0 && val < 90.0 {
                        targets.push((v.tan(), RootKind::Principal));
                    }
                }
            }
            g
        }
        Expr::Pow(g, q) => {
            let n = q.denom().to_i64().ok_or_else(|| unsupported("exponent too large"))?;
            if q.numer().abs().is_one() && !q.is_integer() {
                let sign = if q.is_negative() { -1 } else { 1 };
                if n % 2 == 0 && val < 0.0 {
                    return Ok(Vec::new());
                }
                if sign < 0 && val == 0.0 {
                    return Ok(Vec::new());
                }
                targets.push((v.powi(sign * n), RootKind::Principal));
            } else if q.is_integer() {
                let n = q.to_i64().ok_or_else(|| unsupported("exponent too large"))?;
                if n < 0 {
                    if val == 0.0 {
                        return Ok(Vec::new());
                    }
                    for w in pure_power(-n, v.powi(-1))? {
                        targets.push((w.value, RootKind::Principal));
                    }
                } else {
                    for w in pure_power(n, v)? {
                        targets.push((w.value, RootKind::Principal));
                    }
                }
            } else {
                return Err(unsupported("fractional power"));
            }
            g
        }
        _ => return Err(unsupported("unknown atom")),
    };
    let mut out = Vec::new();
    for (target, kind) in targets {
        let e = expand(&(inner.clone() - target));
        if !e.contains(u) {
            continue;
        }
        for mut r in solve_zero(&e, u, depth + 1)? {
            r.kind = r.kind.max(kind);
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(roots: &[Root]) -> Vec<Expr> {
        roots.iter().map(|r| r.value.clone()).collect()
    }

    #[test]
    fn pythagorean_height() {
        let v0 = Symbol::process(0);
        let eq = Equation::new(
            Expr::Sym(v0.clone()).powi(2) + Expr::int(7).powi(2),
            Expr::int(13).powi(2),
        );
        let roots = solve_single(&eq, &v0).unwrap();
        let r = Expr::int(2) * Expr::int(30).sqrt();
        assert_eq!(values(&roots), alloc::vec![-r.clone(), r]);
    }

    #[test]
    fn linear_angle_sum() {
        let x = Symbol::new("x");
        let xe = Expr::Sym(x.clone());
        let eq = Equation::new(
            Expr::int(3) * xe.clone() + (Expr::int(4) * xe + Expr::int(61)),
            Expr::int(180),
        );
        assert_eq!(values(&solve_single(&eq, &x).unwrap()), alloc::vec![Expr::int(17)]);
    }

    #[test]
    fn sine_principal_and_supplementary() {
        let c = Symbol::new("c");
        let eq = Equation::new(Expr::Sym(c.clone()).sin(), Expr::rational(1, 2));
        let roots = solve_single(&eq, &c).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], Root { value: Expr::int(30), kind: RootKind::Principal });
        assert_eq!(roots[1], Root { value: Expr::int(150), kind: RootKind::Supplementary });
    }

    #[test]
    fn right_angle_has_single_root() {
        let c = Symbol::new("c");
        let eq = Equation::new(Expr::Sym(c.clone()).sin(), Expr::one());
        assert_eq!(values(&solve_single(&eq, &c).unwrap()), alloc::vec![Expr::int(90)]);
    }

    #[test]
    fn square_root_isolation() {
        let v = Symbol::new("v");
        // sqrt(4 v) = 6
        let eq = Equation::new((Expr::int(4) * Expr::Sym(v.clone())).sqrt(), Expr::int(6));
        assert_eq!(values(&solve_single(&eq, &v).unwrap()), alloc::vec![Expr::int(9)]);
        let neg = Equation::new(Expr::Sym(v.clone()).sqrt(), Expr::int(-1));
        assert_eq!(solve_single(&neg, &v), Err(SolveError::NoRealRoot));
    }

    #[test]
    fn regular_polygon_side_count() {
        // n * 1^2 * tan(180/n) = 4 tan(45) -> n = 4 is not isolable in closed form,
        // but 360/n inside a sine with a known value is.
        let n = Symbol::new("n");
        let eq = Equation::new(
            (Expr::int(360) / Expr::Sym(n.clone())).sin(),
            Expr::one(),
        );
        assert_eq!(values(&solve_single(&eq, &n).unwrap()), alloc::vec![Expr::int(4)]);
    }

    #[test]
    fn no_real_root_and_errors() {
        let u = Symbol::new("u");
        let ue = Expr::Sym(u.clone());
        let eq = Equation::new(ue.clone().powi(2), Expr::int(-1));
        assert_eq!(solve_single(&eq, &u), Err(SolveError::NoRealRoot));
        let absent = Equation::new(Expr::int(1), Expr::int(1));
        assert_eq!(solve_single(&absent, &u), Err(SolveError::NotPresent(u.clone())));
        let cubic = Equation::new(ue.clone().powi(3) + ue.clone(), Expr::int(2));
        assert!(matches!(solve_single(&cubic, &u), Err(SolveError::UnsupportedShape(_))));
        let mixed = Equation::new(ue.clone() + ue.clone().sin(), Expr::int(2));
        assert!(matches!(solve_single(&mixed, &u), Err(SolveError::UnsupportedShape(_))));
    }

    #[test]
    fn pure_cubic() {
        let u = Symbol::new("u");
        let eq = Equation::new(Expr::Sym(u.clone()).powi(3), Expr::int(-8));
        assert_eq!(values(&solve_single(&eq, &u).unwrap()), alloc::vec![Expr::int(-2)]);
    }

    #[test]
    fn zero_root_from_common_factor() {
        let u = Symbol::new("u");
        let ue = Expr::Sym(u.clone());
        let eq = Equation::new(ue.clone().powi(2), Expr::int(3) * ue);
        assert_eq!(values(&solve_single(&eq, &u).unwrap()), alloc::vec![Expr::zero(), Expr::int(3)]);
    }

    #[test]
    fn large_constant_keeps_unit_leading_coefficient() {
        let v = Symbol::new("v");
        let eq = Equation::new(Expr::int(1) + Expr::int(3_184_272).powi(2), Expr::Sym(v.clone()).powi(2));
        assert_eq!(solve_single(&eq, &v).unwrap().len(), 2);
    }
}
