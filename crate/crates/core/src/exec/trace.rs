use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{simplify, substitute, Environment, Equation, Expr, Symbol};
use crate::lang::Instruction;

/// A root choice made while solving.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    /// Position in the global solve order.
    pub step: usize,
    pub unknown: Symbol,
    pub roots: Vec<Expr>,
    pub chosen: Expr,
    /// The unknown was eliminated as an expression in later unknowns.
    pub eliminated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub index: usize,
    pub instruction: Instruction,
    /// `None` for `Get`.
    pub equation: Option<Equation>,
    pub events: Vec<TraceEvent>,
    pub note: Option<String>,
}

/// One record per instruction, in program order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExecutionTrace {
    pub records: Vec<TraceRecord>,
}

impl ExecutionTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rebuilds the solved environment from the recorded choices alone.
    pub fn replay(&self) -> Environment {
        let mut events: Vec<&TraceEvent> = self.records.iter().flat_map(|r| &r.events).collect();
        events.sort_by_key(|e| e.step);
        let mut env = Environment::new();
        for e in &events {
            let value = substitute(&e.chosen, &env);
            env.insert(e.unknown.clone(), value);
        }
        // eliminated unknowns refer to choices made after them
        for _ in 0..=events.len() {
            let snapshot = env.clone();
            let mut changed = false;
            for v in env.values_mut() {
                if v.has_symbols() {
                    let next = substitute(v, &snapshot);
                    changed |= next != *v;
                    *v = next;
                }
            }
            if !changed {
                break;
            }
        }
        env.values_mut().for_each(|v| *v = simplify(v));
        env
    }
}

impl fmt::Display for ExecutionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            write!(f, "#{} {}", r.index, r.instruction)?;
            if let Some(eq) = &r.equation {
                write!(f, "\n  equation: {eq}")?;
            }
            for e in &r.events {
                let verb = if e.eliminated { "eliminated" } else { "solved" };
                write!(f, "\n  step {} {verb} {} = {}", e.step, e.unknown, e.chosen)?;
                if e.roots.len() > 1 {
                    f.write_str(" from [")?;
                    for (i, root) in e.roots.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{root}")?;
                    }
                    f.write_str("]")?;
                }
            }
            if let Some(n) = &r.note {
                write!(f, "\n  note: {n}")?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}
