use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, Symbol};

use super::operand::MAX_INDEX;
use super::parse_expr::{check_param_polynomial, parse_expr, Mode};
use super::LangError;

/// Bindings of problem operands to values or polynomials in unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamSet {
    pub bindings: BTreeMap<u32, Expr>,
}

impl ParamSet {
    pub fn new() -> Self {
        ParamSet::default()
    }

    pub fn get(&self, index: u32) -> Option<&Expr> {
        self.bindings.get(&index)
    }

    /// Adds a binding; fails if the index is already bound.
    pub fn bind(&mut self, index: u32, value: Expr) -> Result<(), LangError> {
        if self.bindings.contains_key(&index) {
            return Err(LangError::DuplicateBinding(index));
        }
        self.bindings.insert(index, value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Unknown names (such as `x`) occurring in any binding.
    pub fn unknowns(&self) -> BTreeSet<Symbol> {
        self.bindings.values().flat_map(Expr::free_symbols).collect()
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "N{k}={v}")?;
        }
        Ok(())
    }
}

/// Start of a binding head such as `N0 =`: byte offset, target token and
/// the offset just past `=`.
fn heads(text: &str) -> Vec<(usize, &str, usize)> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let boundary = i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_');
        if boundary && b[i].is_ascii_uppercase() {
            let mut j = i + 1;
            while j < b.len() && (b[j].is_ascii_digit() || b[j] == b'.') {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].is_ascii_whitespace() {
                k += 1;
            }
            if j > i + 1 && k < b.len() && b[k] == b'=' {
                out.push((i, &text[i..j], k + 1));
                i = k + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn trim_separators(s: &str) -> &str {
    s.trim_matches(|c: char| c.is_whitespace() || c == ',' || c == ';')
}

/// Parses `N0=15, N1=13` or `N0 = 3*x  N1 = 4*x + 61` style bindings.
pub fn parse_params(text: &str) -> Result<ParamSet, LangError> {
    let mut set = ParamSet::new();
    let hs = heads(text);
    let prefix_end = hs.first().map_or(text.len(), |h| h.0);
    let prefix = trim_separators(&text[..prefix_end]);
    if !prefix.is_empty() {
        return Err(LangError::MalformedExpression(format!("unexpected `{prefix}` before a binding")));
    }
    for (n, &(_, target, value_start)) in hs.iter().enumerate() {
        let value_end = hs.get(n + 1).map_or(text.len(), |h| h.0);
        let value = trim_separators(&text[value_start..value_end]);
        let index = match target.split_at(1) {
            ("N", digits) => match digits.parse::<u32>() {
                Ok(i) if i <= MAX_INDEX && !digits.contains('.') && digits.len() <= 2 => i,
                _ => return Err(LangError::MalformedExpression(format!("bad binding target `{target}`"))),
            },
            _ => return Err(LangError::NonProblemTarget(String::from(target))),
        };
        if value.is_empty() {
            return Err(LangError::MalformedExpression(format!("`{target}` has no value")));
        }
        let expr = parse_expr(value, Mode::Param)
            .and_then(|e| check_param_polynomial(&e).map(|()| e))
            .map_err(|m| LangError::MalformedExpression(format!("{target}: {m}")))?;
        set.bind(index, expr)?;
    }
    let unknowns = set.unknowns();
    if unknowns.len() > 3 {
        return Err(LangError::MalformedExpression(String::from("more than three unknowns")));
    }
    Ok(set)
}
