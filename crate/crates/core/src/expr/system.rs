//! Propagation solver for the equation systems programs instantiate.
//!
//! Equations are taken in program order: the first one with a single
//! unresolved unknown is solved in closed form and its root substituted
//! everywhere. When every remaining equation couples several unknowns, a
//! cluster of at most three is reduced by eliminating an unknown that occurs
//! linearly with a constant coefficient. Root choices that lead to a
//! contradiction further down are backtracked.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    coefficients, eval_ground, eval_numeric, expand, solve_single, substitute, Environment,
    Equation, EvalError, Expr, Root, SolveError, Symbol,
};
use crate::exec::{select_root, RootPolicy};

const MAX_NODES: usize = 20_000;
const MAX_CLUSTER: usize = 3;
/// Residual tolerance, relative to `max(1, |rhs|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// One step of the solve: which equation fixed which unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveEvent {
    /// Index into the input equation list.
    pub equation: usize,
    pub unknown: Symbol,
    /// Candidate roots, ascending. For eliminated unknowns this is the single
    /// expression in the remaining unknowns.
    pub roots: Vec<Root>,
    pub chosen: Expr,
    /// True when the unknown was eliminated symbolically and resolved by
    /// back-substitution.
    pub eliminated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub env: Environment,
    pub events: Vec<SolveEvent>,
}

#[derive(Clone)]
struct State {
    env: Environment,
    deferred: Vec<(Symbol, Expr)>,
    active: Vec<Option<Equation>>,
    unknowns: BTreeSet<Symbol>,
    events: Vec<SolveEvent>,
}

impl State {
    fn assign(&mut self, u: &Symbol, value: Expr) {
        let mut one = Environment::new();
        one.insert(u.clone(), value.clone());
        for eq in self.active.iter_mut().flatten() {
            if eq.lhs.contains(u) || eq.rhs.contains(u) {
                *eq = eq.substitute(&one);
            }
        }
        self.unknowns.remove(u);
        self.env.insert(u.clone(), value);
    }
}

struct Search {
    policy: RootPolicy,
    nodes: usize,
}

fn eval_failure(err: EvalError) -> SolveError {
    match err {
        EvalError::DomainError(m) => SolveError::DomainError(m),
        other => SolveError::UnsolvedSystem(format!("{other}")),
    }
}

fn residual_ok(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= RESIDUAL_TOLERANCE * rhs.abs().max(1.0)
}

fn list(symbols: &BTreeSet<Symbol>) -> String {
    let names: Vec<&str> = symbols.iter().map(Symbol::name).collect();
    names.join(", ")
}

/// Solves `eqs` for every symbol in `unknowns`.
///
/// Returns an environment assigning each unknown an exact, symbol-free
/// expression, together with the solve events that produced it. Fails with
/// `UnsolvedSystem` when no progress is possible (including unknowns no
/// equation constrains), `AmbiguousSolution` when the root policy cannot
/// choose, and `Inconsistent` when an equation is violated.
pub fn solve_system(
    eqs: &[Equation],
    unknowns: &BTreeSet<Symbol>,
    policy: RootPolicy,
) -> Result<Solution, SolveError> {
    let mut stray = BTreeSet::new();
    for eq in eqs {
        stray.extend(eq.free_symbols().into_iter().filter(|s| !unknowns.contains(s)));
    }
    if !stray.is_empty() {
        return Err(SolveError::UnsolvedSystem(format!(
            "symbols {} are neither known nor unknowns",
            list(&stray)
        )));
    }
    let state = State {
        env: Environment::new(),
        deferred: Vec::new(),
        active: eqs.iter().cloned().map(Some).collect(),
        unknowns: unknowns.clone(),
        events: Vec::new(),
    };
    let mut search = Search { policy, nodes: 0 };
    let done = search.run(state)?;
    for (i, eq) in eqs.iter().enumerate() {
        let l = eval_numeric(&eq.lhs, &done.env).map_err(eval_failure)?;
        let r = eval_numeric(&eq.rhs, &done.env).map_err(eval_failure)?;
        if !residual_ok(l, r) {
            return Err(SolveError::Inconsistent { equation: i, residual: l - r });
        }
    }
    Ok(Solution { env: done.env, events: done.events })
}

impl Search {
    fn run(&mut self, mut st: State) -> Result<State, SolveError> {
        loop {
            self.nodes += 1;
            if self.nodes > MAX_NODES {
                return Err(SolveError::UnsolvedSystem(String::from("search budget exhausted")));
            }
            for (i, slot) in st.active.iter_mut().enumerate() {
                let Some(eq) = slot else { continue };
                if eq.lhs.has_symbols() || eq.rhs.has_symbols() {
                    continue;
                }
                let l = eval_ground(&eq.lhs).map_err(eval_failure)?;
                let r = eval_ground(&eq.rhs).map_err(eval_failure)?;
                if !residual_ok(l, r) {
                    return Err(SolveError::Inconsistent { equation: i, residual: l - r });
                }
                *slot = None;
            }
            if st.active.iter().all(Option::is_none) {
                if !st.unknowns.is_empty() {
                    return Err(SolveError::UnsolvedSystem(format!(
                        "nothing constrains {}",
                        list(&st.unknowns)
                    )));
                }
                self.resolve_deferred(&mut st)?;
                return Ok(st);
            }

            let mut soft_error = None;
            for i in 0..st.active.len() {
                let Some(eq) = &st.active[i] else { continue };
                let symbols = eq.free_symbols();
                if symbols.len() != 1 {
                    continue;
                }
                let u = symbols.into_iter().next().unwrap();
                match solve_single(eq, &u) {
                    Ok(roots) => return self.branch(st, i, u, roots),
                    Err(e @ (SolveError::UnsupportedShape(_) | SolveError::Degenerate(_))) => {
                        soft_error.get_or_insert(e);
                    }
                    Err(e) => return Err(e),
                }
            }
            if !self.eliminate(&mut st) {
                return Err(soft_error.unwrap_or_else(|| {
                    SolveError::UnsolvedSystem(format!(
                        "no equation isolates any of {}",
                        list(&st.unknowns)
                    ))
                }));
            }
        }
    }

    fn branch(
        &mut self,
        st: State,
        equation: usize,
        u: Symbol,
        roots: Vec<Root>,
    ) -> Result<State, SolveError> {
        let mut finished: Vec<Option<State>> = (0..roots.len()).map(|_| None).collect();
        let choice = select_root(&roots, self.policy, &u, |k| {
            let mut next = st.clone();
            next.active[equation] = None;
            next.events.push(SolveEvent {
                equation,
                unknown: u.clone(),
                roots: roots.clone(),
                chosen: roots[k].value.clone(),
                eliminated: false,
            });
            next.assign(&u, roots[k].value.clone());
            finished[k] = Some(self.run(next)?);
            Ok(())
        })?;
        Ok(finished[choice].take().expect("chosen branch completed"))
    }

    /// Eliminates one linearly occurring unknown from the first coupled
    /// cluster. Returns false when nothing can be eliminated.
    fn eliminate(&mut self, st: &mut State) -> bool {
        let Some(first) = st.active.iter().position(Option::is_some) else { return false };
        let mut cluster: BTreeSet<Symbol> = st.active[first].as_ref().unwrap().free_symbols();
        let mut members: BTreeSet<usize> = BTreeSet::new();
        members.insert(first);
        loop {
            let mut grew = false;
            for (i, eq) in st.active.iter().enumerate() {
                let Some(eq) = eq else { continue };
                if members.contains(&i) {
                    continue;
                }
                let fs = eq.free_symbols();
                if !fs.is_disjoint(&cluster) {
                    cluster.extend(fs);
                    members.insert(i);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if cluster.len() > MAX_CLUSTER {
            return false;
        }
        for &i in &members {
            let eq = st.active[i].as_ref().unwrap();
            let residual = expand(&eq.residual());
            for u in eq.free_symbols() {
                let Some(coeffs) = coefficients(&residual, &u) else { continue };
                if coeffs.keys().any(|&k| k != 0 && k != 1) {
                    continue;
                }
                let Some(slope) = coeffs.get(&1) else { continue };
                if slope.has_symbols() {
                    continue;
                }
                match eval_ground(slope) {
                    Ok(v) if v.abs() > 1e-12 => {}
                    _ => continue,
                }
                let offset = coeffs.get(&0).cloned().unwrap_or_else(Expr::zero);
                let value = -offset / slope.clone();
                st.active[i] = None;
                st.events.push(SolveEvent {
                    equation: i,
                    unknown: u.clone(),
                    roots: alloc::vec![Root { value: value.clone(), kind: super::RootKind::Principal }],
                    chosen: value.clone(),
                    eliminated: true,
                });
                let mut one = Environment::new();
                one.insert(u.clone(), value.clone());
                for eq in st.active.iter_mut().flatten() {
                    *eq = eq.substitute(&one);
                }
                st.unknowns.remove(&u);
                st.deferred.push((u, value));
                return true;
            }
        }
        false
    }

    fn resolve_deferred(&mut self, st: &mut State) -> Result<(), SolveError> {
        while let Some((u, expr)) = st.deferred.pop() {
            let value = substitute(&expr, &st.env);
            if value.has_symbols() {
                return Err(SolveError::UnsolvedSystem(format!("{u} stays symbolic")));
            }
            let v = eval_ground(&value).map_err(eval_failure)?;
            if self.policy == RootPolicy::NonnegativePreferred && u.is_process() && v < -1e-12 * v.abs().max(1.0) {
                return Err(SolveError::NoRealRoot);
            }
            st.env.insert(u, value);
        }
        Ok(())
    }
}
