use core::fmt;

use crate::expr::{format_rational, Rational};

use super::parse_expr::parse_decimal;

/// Largest accepted `N`/`V` index.
pub const MAX_INDEX: u32 = 99;

/// An operand token: `N<i>`, `V<i>` or `C<decimal>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operand {
    Problem(u32),
    Process(u32),
    Constant(Rational),
}

impl Operand {
    /// Parses one operand token. Returns `None` for anything else.
    pub fn parse(token: &str) -> Option<Operand> {
        let (head, rest) = token.split_at_checked(1)?;
        match head {
            "N" | "V" => {
                if rest.is_empty() || rest.len() > 2 || !rest.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                let i: u32 = rest.parse().ok()?;
                if i > MAX_INDEX {
                    return None;
                }
                Some(if head == "N" { Operand::Problem(i) } else { Operand::Process(i) })
            }
            "C" => parse_decimal(rest).map(Operand::Constant),
            _ => None,
        }
    }

    pub fn index(&self) -> Option<u32> {
        match self {
            Operand::Problem(i) | Operand::Process(i) => Some(*i),
            Operand::Constant(_) => None,
        }
    }

    pub fn literal(&self) -> Option<&Rational> {
        match self {
            Operand::Constant(q) => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Problem(i) => write!(f, "N{i}"),
            Operand::Process(i) => write!(f, "V{i}"),
            Operand::Constant(q) => write!(f, "C{}", format_rational(q)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_kinds() {
        assert_eq!(Operand::parse("N0"), Some(Operand::Problem(0)));
        assert_eq!(Operand::parse("V12"), Some(Operand::Process(12)));
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(Operand::parse("C0.5"), Some(Operand::Constant(half)));
        assert_eq!(Operand::parse("C180").unwrap().to_string(), "C180");
        assert_eq!(Operand::parse("C0.50").unwrap().to_string(), "C0.5");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["N", "V", "C", "N100", "Nx", "N-1", "C-1", "C1.", "n0", "X1", "", "N0.5", "Cpi"] {
            assert_eq!(Operand::parse(bad), None, "{bad}");
        }
    }
}
