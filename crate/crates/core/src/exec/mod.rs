//! Program execution: operator templates become equations, the system is
//! solved, and the last `Get` target is evaluated.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{
    eval_numeric, solve_system, Environment, Equation, EvalError, Expr, SolveError, Symbol,
};
use crate::lang::{validate, FindingCode, Instruction, LangError, Operand, ParamSet, Program, Registry};

mod roots;
mod trace;

pub use roots::{select_root, RootPolicy};
pub use trace::{ExecutionTrace, TraceEvent, TraceRecord};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("N{0} has no parameter binding")]
    UnboundOperand(u32),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("program has no Get instruction")]
    NoGetInstruction,
    #[error("Get target {0} was not resolved")]
    UnsolvedVariable(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// The equation system a program denotes.
#[derive(Clone, Debug, PartialEq)]
pub struct Instantiated {
    /// Denominator-free equations, one per non-`Get` instruction.
    pub equations: Vec<Equation>,
    /// Equations as the templates produced them, before clearing.
    pub raw: Vec<Equation>,
    /// Instruction index of each equation.
    pub source: Vec<usize>,
    /// Expressions cleared as denominators; they must not vanish.
    pub nonzero: Vec<Expr>,
    pub unknowns: BTreeSet<Symbol>,
    /// `(instruction index, operand, expression)` per `Get`.
    pub targets: Vec<(usize, Operand, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionResult {
    /// Value of the last `Get` target.
    pub answer: f64,
    /// The same value as an exact expression.
    pub answer_expr: Expr,
    pub environment: Environment,
    pub trace: ExecutionTrace,
    pub warnings: Vec<String>,
}

fn operand_expr(o: &Operand, params: &ParamSet) -> Result<Expr, ExecError> {
    match o {
        Operand::Problem(i) => params.get(*i).cloned().ok_or(ExecError::UnboundOperand(*i)),
        Operand::Process(i) => Ok(Expr::Sym(Symbol::process(*i))),
        Operand::Constant(q) => Ok(Expr::Num(q.clone())),
    }
}

/// Instantiates every instruction's template.
pub fn instantiate_equations(
    p: &Program,
    params: &ParamSet,
    registry: &Registry,
) -> Result<Instantiated, ExecError> {
    let mut out = Instantiated {
        equations: Vec::new(),
        raw: Vec::new(),
        source: Vec::new(),
        nonzero: Vec::new(),
        unknowns: BTreeSet::new(),
        targets: Vec::new(),
    };
    for (idx, ins) in p.instructions.iter().enumerate() {
        let spec = registry.get(&ins.op).ok_or_else(|| LangError::UnknownOperator {
            token: ins.op.clone(),
            position: None,
        })?;
        let form = spec.form_for(ins.args.len()).ok_or_else(|| LangError::ArityMismatch {
            operator: ins.op.clone(),
            instruction: idx,
            found: ins.args.len(),
            expected: spec.arity_text(),
        })?;
        let args = ins
            .args
            .iter()
            .map(|a| operand_expr(a, params))
            .collect::<Result<Vec<_>, _>>()?;
        for a in &args {
            out.unknowns.extend(a.free_symbols());
        }
        match form.template.instantiate(&args) {
            Some(eq) => {
                let (cleared, dens) = eq.clear_denominators();
                out.raw.push(eq);
                out.equations.push(cleared);
                out.source.push(idx);
                out.nonzero.extend(dens);
            }
            None => {
                let operand = ins.args[0].clone();
                if matches!(operand, Operand::Constant(_)) {
                    return Err(ExecError::InvalidProgram(format!("`{ins}` targets a constant")));
                }
                out.targets.push((idx, operand, args[0].clone()));
            }
        }
    }
    Ok(out)
}

/// Validates (leniently), instantiates, solves and evaluates `p`.
pub fn execute(
    p: &Program,
    params: &ParamSet,
    registry: &Registry,
    policy: RootPolicy,
) -> Result<ExecutionResult, ExecError> {
    let report = validate(p, params, false);
    if let Some(first) = report.errors.first() {
        return Err(match first.code {
            FindingCode::UnboundOperand => {
                let index = p.instructions[first.instruction]
                    .args
                    .iter()
                    .find_map(|a| match a {
                        Operand::Problem(i) if params.get(*i).is_none() => Some(*i),
                        _ => None,
                    })
                    .unwrap_or(0);
                ExecError::UnboundOperand(index)
            }
            _ => ExecError::InvalidProgram(first.message.clone()),
        });
    }
    let mut warnings: Vec<String> = report.warnings.iter().map(|w| w.message.clone()).collect();

    let inst = instantiate_equations(p, params, registry)?;
    let Some((target_idx, target_op, target)) = inst.targets.last().cloned() else {
        return Err(ExecError::NoGetInstruction);
    };
    for (idx, op, _) in &inst.targets[..inst.targets.len() - 1] {
        warnings.push(format!("Get {op} at instruction {idx} is superseded by instruction {target_idx}"));
    }

    let solution = solve_system(&inst.equations, &inst.unknowns, policy)?;
    let env = solution.env;
    for den in &inst.nonzero {
        match eval_numeric(den, &env) {
            Ok(v) if v.abs() > 1e-12 => {}
            Ok(_) => return Err(SolveError::DomainError(format!("denominator {den} vanishes")).into()),
            Err(e) => return Err(eval_to_exec(e, &target_op)),
        }
    }

    let answer_expr = crate::expr::substitute(&target, &env);
    let answer = eval_numeric(&target, &env).map_err(|e| eval_to_exec(e, &target_op))?;

    let mut records: Vec<TraceRecord> = p
        .instructions
        .iter()
        .enumerate()
        .map(|(index, ins)| TraceRecord {
            index,
            instruction: ins.clone(),
            equation: None,
            events: Vec::new(),
            note: get_note(ins, index, target_idx),
        })
        .collect();
    for (k, eq) in inst.raw.iter().enumerate() {
        records[inst.source[k]].equation = Some(eq.clone());
    }
    for (step, ev) in solution.events.iter().enumerate() {
        records[inst.source[ev.equation]].events.push(TraceEvent {
            step,
            unknown: ev.unknown.clone(),
            roots: ev.roots.iter().map(|r| r.value.clone()).collect(),
            chosen: ev.chosen.clone(),
            eliminated: ev.eliminated,
        });
    }

    Ok(ExecutionResult {
        answer,
        answer_expr,
        environment: env,
        trace: ExecutionTrace { records },
        warnings,
    })
}

fn get_note(ins: &Instruction, index: usize, target_idx: usize) -> Option<String> {
    if !ins.is_get() {
        None
    } else if index == target_idx {
        Some(String::from("answer"))
    } else {
        Some(String::from("superseded"))
    }
}

fn eval_to_exec(e: EvalError, target: &Operand) -> ExecError {
    match e {
        EvalError::DomainError(m) => SolveError::DomainError(m).into(),
        EvalError::UnboundSymbol(_) | EvalError::TooDeep => ExecError::UnsolvedVariable(format!("{target}")),
    }
}
