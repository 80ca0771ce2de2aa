//! Answer extraction and the binary reward.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::Engine;
use crate::exec::{ExecError, ExecutionTrace};
use crate::expr::SolveError;
use crate::lang::{parse_params, parse_program, validate, FindingCode, LangError};

/// `|computed - truth| <= max(abs, rel * |truth|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-2, rel: 1e-3 }
    }
}

impl Tolerance {
    pub fn accepts(&self, computed: f64, truth: f64) -> bool {
        if !computed.is_finite() || !truth.is_finite() {
            return false;
        }
        (computed - truth).abs() <= self.abs.max(self.rel * truth.abs())
    }
}

/// Default-tolerance comparison of a computed answer with the ground truth.
pub fn compare_answer(computed: f64, truth: f64) -> bool {
    Tolerance::default().accepts(computed, truth)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    Match,
    NumericMismatch,
    NoBoxedAnswer,
    ParseError,
    UnknownOperator,
    ArityMismatch,
    UnboundOperand,
    UnsolvedSystem,
    AmbiguousSolution,
    DomainError,
    NoGet,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 11] = [
        DiagnosticCode::Match,
        DiagnosticCode::NumericMismatch,
        DiagnosticCode::NoBoxedAnswer,
        DiagnosticCode::ParseError,
        DiagnosticCode::UnknownOperator,
        DiagnosticCode::ArityMismatch,
        DiagnosticCode::UnboundOperand,
        DiagnosticCode::UnsolvedSystem,
        DiagnosticCode::AmbiguousSolution,
        DiagnosticCode::DomainError,
        DiagnosticCode::NoGet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Match => "Match",
            DiagnosticCode::NumericMismatch => "NumericMismatch",
            DiagnosticCode::NoBoxedAnswer => "NoBoxedAnswer",
            DiagnosticCode::ParseError => "ParseError",
            DiagnosticCode::UnknownOperator => "UnknownOperator",
            DiagnosticCode::ArityMismatch => "ArityMismatch",
            DiagnosticCode::UnboundOperand => "UnboundOperand",
            DiagnosticCode::UnsolvedSystem => "UnsolvedSystem",
            DiagnosticCode::AmbiguousSolution => "AmbiguousSolution",
            DiagnosticCode::DomainError => "DomainError",
            DiagnosticCode::NoGet => "NoGet",
        }
    }

    pub fn from_name(name: &str) -> Option<DiagnosticCode> {
        DiagnosticCode::ALL.into_iter().find(|c| c.as_str() == name)
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&LangError> for DiagnosticCode {
    fn from(e: &LangError) -> Self {
        match e {
            LangError::UnknownOperator { .. } => DiagnosticCode::UnknownOperator,
            LangError::ArityMismatch { .. } => DiagnosticCode::ArityMismatch,
            _ => DiagnosticCode::ParseError,
        }
    }
}

impl From<&ExecError> for DiagnosticCode {
    fn from(e: &ExecError) -> Self {
        match e {
            ExecError::Lang(l) => l.into(),
            ExecError::UnboundOperand(_) => DiagnosticCode::UnboundOperand,
            ExecError::InvalidProgram(_) => DiagnosticCode::ParseError,
            ExecError::NoGetInstruction => DiagnosticCode::NoGet,
            ExecError::UnsolvedVariable(_) => DiagnosticCode::UnsolvedSystem,
            ExecError::Solve(s) => match s {
                SolveError::AmbiguousSolution(_) => DiagnosticCode::AmbiguousSolution,
                SolveError::DomainError(_) | SolveError::NoRealRoot => DiagnosticCode::DomainError,
                _ => DiagnosticCode::UnsolvedSystem,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("no \\boxed{{...}} answer")]
    NoBoxedAnswer,
    #[error("unbalanced braces in \\boxed{{...}}")]
    UnbalancedBraces,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractedSolution {
    pub program_text: String,
    pub params_text: String,
    pub box_count: usize,
}

const BOX: &str = "\\boxed{";

/// Finds every `\boxed{...}` span and splits them into program boxes and
/// parameter boxes (those containing `=`), each concatenated in order.
pub fn extract_boxed(response: &str) -> Result<ExtractedSolution, ExtractError> {
    let mut program: Vec<String> = Vec::new();
    let mut params: Vec<String> = Vec::new();
    let mut count = 0;
    let mut rest = response;
    while let Some(at) = rest.find(BOX) {
        let body_start = at + BOX.len();
        let body = &rest[body_start..];
        let mut depth = 1usize;
        let mut end = None;
        for (i, b) in body.bytes().enumerate() {
            match b {
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(i);
                        break;
                    }
                }
                _ => {}
            }
        }
        let end = end.ok_or(ExtractError::UnbalancedBraces)?;
        let content = clean_box(&body[..end]);
        count += 1;
        let trimmed = content.trim();
        if !trimmed.is_empty() {
            if trimmed.contains('=') {
                params.push(String::from(trimmed));
            } else {
                program.push(String::from(trimmed));
            }
        }
        rest = &body[end + 1..];
    }
    if count == 0 {
        return Err(ExtractError::NoBoxedAnswer);
    }
    Ok(ExtractedSolution { program_text: program.join(" "), params_text: params.join(" "), box_count: count })
}

/// Strips common LaTeX wrappers models put around formal tokens.
fn clean_box(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    'outer: while !rest.is_empty() {
        for cmd in ["\\texttt{", "\\text{", "\\mathrm{", "\\mathtt{"] {
            if let Some(after) = rest.strip_prefix(cmd) {
                rest = after;
                continue 'outer;
            }
        }
        if let Some(after) = rest.strip_prefix("\\_") {
            out.push('_');
            rest = after;
            continue;
        }
        if let Some(after) = rest.strip_prefix("\\,").or_else(|| rest.strip_prefix("\\ ")).or_else(|| rest.strip_prefix("~")) {
            out.push(' ');
            rest = after;
            continue;
        }
        let c = rest.chars().next().unwrap();
        if !matches!(c, '{' | '}' | '$') {
            out.push(c);
        } else {
            out.push(' ');
        }
        rest = &rest[c.len_utf8()..];
    }
    out
}

/// The reward and why.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    /// 1 exactly when `diagnostic` is `Match`.
    pub reward: u8,
    pub value: Option<f64>,
    pub truth: f64,
    pub diagnostic: DiagnosticCode,
    /// Human-readable failure detail, empty on a match.
    pub detail: String,
    pub program: String,
    pub params: String,
    pub trace: Option<ExecutionTrace>,
}

impl Verdict {
    fn fail(code: DiagnosticCode, detail: String, truth: f64, program: &str, params: &str) -> Verdict {
        Verdict {
            reward: 0,
            value: None,
            truth,
            diagnostic: code,
            detail,
            program: String::from(program),
            params: String::from(params),
            trace: None,
        }
    }

    pub fn is_match(&self) -> bool {
        self.reward == 1
    }
}

/// Parses, validates, executes and compares. Never panics on any input.
pub fn verify_program(engine: &Engine, program_text: &str, params_text: &str, truth: f64) -> Verdict {
    use alloc::string::ToString;
    let fail = |code, detail: String| Verdict::fail(code, detail, truth, program_text, params_text);
    if !truth.is_finite() {
        return fail(DiagnosticCode::ParseError, String::from("ground truth is not finite"));
    }
    let program = match parse_program(program_text, engine.registry()) {
        Ok(p) => p,
        Err(e) => return fail((&e).into(), e.to_string()),
    };
    let params = match parse_params(params_text) {
        Ok(p) => p,
        Err(e) => return fail((&e).into(), e.to_string()),
    };
    let report = validate(&program, &params, engine.strict());
    if let Some(first) = report.errors.first() {
        let code = match first.code {
            FindingCode::UnboundOperand => DiagnosticCode::UnboundOperand,
            _ => DiagnosticCode::ParseError,
        };
        return fail(code, first.message.clone());
    }
    match engine.execute(&program, &params) {
        Ok(result) => {
            let matched = compare_answer(result.answer, truth);
            Verdict {
                reward: matched as u8,
                value: Some(result.answer),
                truth,
                diagnostic: if matched { DiagnosticCode::Match } else { DiagnosticCode::NumericMismatch },
                detail: if matched {
                    String::new()
                } else {
                    alloc::format!("computed {} but expected {}", result.answer, truth)
                },
                program: String::from(program_text),
                params: String::from(params_text),
                trace: Some(result.trace),
            }
        }
        Err(e) => fail((&e).into(), e.to_string()),
    }
}

/// [`verify_program`] on the boxed solution inside a raw model response.
pub fn verify_response(engine: &Engine, response: &str, truth: f64) -> Verdict {
    use alloc::string::ToString;
    match extract_boxed(response) {
        Ok(x) if x.program_text.trim().is_empty() => Verdict::fail(
            DiagnosticCode::NoBoxedAnswer,
            String::from("no boxed program"),
            truth,
            "",
            &x.params_text,
        ),
        Ok(x) => verify_program(engine, &x.program_text, &x.params_text, truth),
        Err(ExtractError::NoBoxedAnswer) => Verdict::fail(
            DiagnosticCode::NoBoxedAnswer,
            ExtractError::NoBoxedAnswer.to_string(),
            truth,
            "",
            "",
        ),
        Err(e) => Verdict::fail(DiagnosticCode::ParseError, e.to_string(), truth, "", ""),
    }
}
