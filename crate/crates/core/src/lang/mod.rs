//! The formal language: operands, the operator registry, program and
//! parameter parsing, and static validation.

use alloc::string::String;

mod operand;
mod params;
mod parse_expr;
mod program;
mod registry;
mod validate;

pub use operand::{Operand, MAX_INDEX};
pub use params::{parse_params, ParamSet};
pub use program::{parse_program, serialize_program, Instruction, Program};
pub use registry::{lookup_operator, Arity, Form, OperatorSpec, Registry, Template};
pub use validate::{validate, Finding, FindingCode, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("unknown operator `{token}`")]
    UnknownOperator { token: String, position: Option<usize> },
    #[error("instruction {instruction} (`{operator}`) has {found} operands, expected {expected}")]
    ArityMismatch { operator: String, instruction: usize, found: usize, expected: String },
    #[error("malformed operand `{token}` at token {position}")]
    MalformedOperand { token: String, position: usize },
    #[error("empty program")]
    EmptyProgram,
    #[error("N{0} is bound twice")]
    DuplicateBinding(u32),
    #[error("malformed parameter expression: {0}")]
    MalformedExpression(String),
    #[error("`{0}` cannot be bound, only N operands take parameters")]
    NonProblemTarget(String),
    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },
}
