//! Parser, symbolic solver and answer verifier for a geometric operator
//! language.
//!
//! A *program* is a space-delimited sequence of operator instructions such as
//! `Gougu V0 N2 N1 Para_Area N0 V0 V1 Get V1`. Problem operands (`N0`, `N1`,
//! ...) are bound by a separate parameter list (`N0=15, N1=13, N2=7`), process
//! operands (`V0`, ...) are solved for, and constants (`C180`, `C0.5`) are
//! literal. Every operator instantiates one algebraic equation; the engine
//! solves the resulting system with exact rational/radical arithmetic and
//! reports the value requested by the final `Get`.
//!
//! ```
//! use geosolve_core::Engine;
//!
//! let engine = Engine::bundled();
//! let result = engine
//!     .run("Sum N0 N1 C180 Sum N1 V0 C180 Get V0", "N0 = 3*x  N1 = 4*x + 61")
//!     .unwrap();
//! assert_eq!(result.answer, 51.0);
//! ```
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod exec;
pub mod expr;
pub mod lang;
pub mod metrics;
pub mod verify;

pub use engine::Engine;
pub use exec::{
    execute, instantiate_equations, select_root, ExecError, ExecutionResult, ExecutionTrace,
    Instantiated, RootPolicy,
};
pub use expr::{
    eval_numeric, simplify, solve_single, solve_system, substitute, Environment, Equation,
    EvalError, Expr, Func, Rational, Root, RootKind, SolveError, Symbol,
};
pub use lang::{
    lookup_operator, parse_params, parse_program, serialize_program, validate, Instruction,
    LangError, Operand, OperatorSpec, ParamSet, Program, Registry, ValidationReport,
};
pub use verify::{
    compare_answer, extract_boxed, verify_program, verify_response, DiagnosticCode,
    ExtractedSolution, Tolerance, Verdict,
};
