use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::registry::is_operator_name;
use super::{LangError, Operand, Registry};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    /// Operator name as it appears in the registry.
    pub op: String,
    pub args: Vec<Operand>,
}

impl Instruction {
    pub fn new(op: impl Into<String>, args: Vec<Operand>) -> Self {
        Instruction { op: op.into(), args }
    }

    pub fn is_get(&self) -> bool {
        self.op == "Get"
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.op)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Program { instructions }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of instructions other than `Get`.
    pub fn operator_count(&self) -> usize {
        self.instructions.iter().filter(|i| !i.is_get()).count()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instructions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}

enum Lexeme<'a> {
    Operand(Operand),
    Operator(&'a str),
    Bad(&'a str),
}

fn classify(token: &str) -> Lexeme<'_> {
    if let Some(o) = Operand::parse(token) {
        return Lexeme::Operand(o);
    }
    if is_operator_name(token) && !looks_like_operand(token) {
        return Lexeme::Operator(token);
    }
    Lexeme::Bad(token)
}

/// `N12x`, `V1.5`, `C1.2.3` and friends are broken operands rather than
/// operator names.
fn looks_like_operand(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some('N' | 'V' | 'C'))
        && matches!(chars.next(), Some(c) if c.is_ascii_digit() || c == '.')
}

/// Parses whitespace-delimited program text against `registry`.
///
/// Undefined operators are reported before malformed operands, so a program
/// mixing both is diagnosed as using an unknown operator.
pub fn parse_program(text: &str, registry: &Registry) -> Result<Program, LangError> {
    let lexemes: Vec<Lexeme<'_>> = text.split_whitespace().map(classify).collect();
    if lexemes.is_empty() {
        return Err(LangError::EmptyProgram);
    }
    for (pos, lx) in lexemes.iter().enumerate() {
        if let Lexeme::Operator(name) = lx {
            if registry.get(name).is_none() {
                return Err(LangError::UnknownOperator { token: (*name).to_owned(), position: Some(pos) });
            }
        }
    }
    if let Some((pos, Lexeme::Bad(tok))) = lexemes.iter().enumerate().find(|(_, l)| matches!(l, Lexeme::Bad(_))) {
        return Err(LangError::MalformedOperand { token: (*tok).to_owned(), position: pos });
    }

    let mut instructions: Vec<Instruction> = Vec::new();
    for (pos, lx) in lexemes.into_iter().enumerate() {
        match lx {
            Lexeme::Operator(name) => {
                if let Some(prev) = instructions.last() {
                    check_arity(prev, registry, instructions.len() - 1)?;
                }
                instructions.push(Instruction::new(name, Vec::new()));
            }
            Lexeme::Operand(o) => match instructions.last_mut() {
                Some(ins) => ins.args.push(o),
                None => {
                    return Err(LangError::ArityMismatch {
                        operator: String::new(),
                        instruction: 0,
                        found: pos + 1,
                        expected: String::from("an operator first"),
                    })
                }
            },
            Lexeme::Bad(_) => unreachable!("rejected above"),
        }
    }
    let last = instructions.len() - 1;
    check_arity(&instructions[last], registry, last)?;
    Ok(Program { instructions })
}

fn check_arity(ins: &Instruction, registry: &Registry, index: usize) -> Result<(), LangError> {
    let spec = registry.get(&ins.op).expect("operators resolved before grouping");
    if spec.accepts(ins.args.len()) {
        Ok(())
    } else {
        Err(LangError::ArityMismatch {
            operator: ins.op.clone(),
            instruction: index,
            found: ins.args.len(),
            expected: spec.arity_text(),
        })
    }
}

/// Canonical single-space text; parses back to the same program.
pub fn serialize_program(p: &Program) -> String {
    alloc::format!("{p}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Rational;

    fn reg() -> Registry {
        Registry::bundled()
    }

    #[test]
    fn parses_paper_shapes() {
        let p = parse_program("Gougu N0 N1 V0", &reg()).unwrap();
        assert_eq!(
            p.instructions,
            [Instruction::new("Gougu", alloc::vec![Operand::Problem(0), Operand::Problem(1), Operand::Process(0)])]
        );
        let p = parse_program("Get V0", &reg()).unwrap();
        assert_eq!(p.len(), 1);
        let p = parse_program(
            "Sum V0 N0 C180 Chord2_Ang V0 V1 N1 TanSec_Ang V2 V1 N1 Get V2",
            &reg(),
        )
        .unwrap();
        let arities: Vec<usize> = p.instructions.iter().map(|i| i.args.len()).collect();
        assert_eq!(arities, [3, 3, 3, 1]);
        assert_eq!(p.instructions[0].args[2], Operand::Constant(Rational::from_integer(180.into())));
    }

    #[test]
    fn serialization_normalises_whitespace() {
        let p = parse_program("Sum  N0   N1  C180", &reg()).unwrap();
        assert_eq!(serialize_program(&p), "Sum N0 N1 C180");
        let text = "Sum N0 N1 C180 Sum N1 V0 C180 Get V0";
        assert_eq!(serialize_program(&parse_program(text, &reg()).unwrap()), text);
    }

    #[test]
    fn errors() {
        let r = reg();
        assert!(matches!(parse_program("", &r), Err(LangError::EmptyProgram)));
        assert!(matches!(parse_program(" \n\t", &r), Err(LangError::EmptyProgram)));
        assert!(matches!(
            parse_program("Solve N0 V0 Set V1 Get V1", &r),
            Err(LangError::UnknownOperator { ref token, position: Some(0) }) if token == "Solve"
        ));
        assert!(matches!(parse_program("Gougu N0 N1 Get V0", &r), Err(LangError::ArityMismatch { instruction: 0, .. })));
        assert!(matches!(parse_program("Get V0 V1", &r), Err(LangError::ArityMismatch { .. })));
        assert!(matches!(parse_program("N0 Get V0", &r), Err(LangError::ArityMismatch { .. })));
        assert!(matches!(parse_program("Get X0", &r), Err(LangError::UnknownOperator { .. })));
        assert!(matches!(parse_program("Get V0.5", &r), Err(LangError::MalformedOperand { .. })));
        assert!(matches!(parse_program("Get v0", &r), Err(LangError::MalformedOperand { .. })));
        assert!(matches!(parse_program("Get N100", &r), Err(LangError::MalformedOperand { .. })));
        assert!(matches!(parse_program("Sum N0 N1", &r), Err(LangError::ArityMismatch { .. })));
    }

    #[test]
    fn unknown_operator_beats_malformed_operand() {
        let e = parse_program("Gougu n0 N1 V0 Solve V0", &reg()).unwrap_err();
        assert!(matches!(e, LangError::UnknownOperator { .. }));
    }

    #[test]
    fn operator_count() {
        let p = parse_program("Sum N0 N1 C180 Sum N1 V0 C180 Get V0", &reg()).unwrap();
        assert_eq!(p.operator_count(), 2);
    }
}
