use alloc::vec::Vec;

use crate::expr::{eval_ground, Root, RootKind, SolveError, Symbol};

/// How the solver picks among several real roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RootPolicy {
    /// Prefer the unique nonnegative root; with several, keep the one the
    /// remaining equations accept. Supplementary angles are tried only after
    /// every principal root fails.
    #[default]
    NonnegativePreferred,
    /// Demand exactly one principal root.
    StrictUnique,
}

const SIGN_SLACK: f64 = 1e-12;

fn nonnegative(v: Option<f64>) -> bool {
    match v {
        Some(x) => x >= -SIGN_SLACK * x.abs().max(1.0),
        None => false,
    }
}

/// Chooses one of `roots` (ascending) for `unknown`, returning its index.
///
/// `consistent` is called with candidate indices and must report whether the
/// rest of the system can be solved with that root in place; it is how
/// several admissible roots get disambiguated. Process variables (`V`) must
/// be nonnegative under [`RootPolicy::NonnegativePreferred`]; parameter
/// unknowns prefer nonnegative roots but fall back to negative ones.
pub fn select_root<F>(
    roots: &[Root],
    policy: RootPolicy,
    unknown: &Symbol,
    mut consistent: F,
) -> Result<usize, SolveError>
where
    F: FnMut(usize) -> Result<(), SolveError>,
{
    if roots.is_empty() {
        return Err(SolveError::NoRealRoot);
    }
    match policy {
        RootPolicy::StrictUnique => {
            let principal: Vec<usize> = (0..roots.len())
                .filter(|&i| roots[i].kind == RootKind::Principal)
                .collect();
            match principal.as_slice() {
                [] => Err(SolveError::NoRealRoot),
                [only] => consistent(*only).map(|()| *only),
                _ => Err(SolveError::AmbiguousSolution(unknown.clone())),
            }
        }
        RootPolicy::NonnegativePreferred => {
            let values: Vec<Option<f64>> = roots.iter().map(|r| eval_ground(&r.value).ok()).collect();
            let any_nonneg = values.iter().any(|v| nonnegative(*v));
            let admissible = |i: usize| {
                nonnegative(values[i]) || (!unknown.is_process() && !any_nonneg && values[i].is_some())
            };
            let mut first_error = None;
            for tier in [RootKind::Principal, RootKind::Supplementary] {
                let mut accepted = Vec::new();
                for i in (0..roots.len()).filter(|&i| roots[i].kind == tier && admissible(i)) {
                    match consistent(i) {
                        Ok(()) => accepted.push(i),
                        Err(e) => {
                            first_error.get_or_insert(e);
                        }
                    }
                }
                match accepted.as_slice() {
                    [] => continue,
                    [only] => return Ok(*only),
                    _ => return Err(SolveError::AmbiguousSolution(unknown.clone())),
                }
            }
            Err(first_error.unwrap_or(SolveError::NoRealRoot))
        }
    }
}
