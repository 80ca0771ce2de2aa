//! Operator registry: names, accepted arities and equation templates, loaded
//! from a line-oriented table (see `registry.txt` for the format).

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Environment, Equation, Expr, Symbol};

use super::parse_expr::{parse_expr, Mode};
use super::LangError;

const BUNDLED: &str = include_str!("registry.txt");
const PLACEHOLDERS: [&str; 4] = ["a", "b", "c", "d"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }

    pub fn min(self) -> usize {
        match self {
            Arity::Exactly(k) | Arity::AtLeast(k) => k,
        }
    }

    fn overlaps(self, other: Arity) -> bool {
        match (self, other) {
            (Arity::Exactly(a), Arity::Exactly(b)) => a == b,
            (Arity::Exactly(a), Arity::AtLeast(b)) | (Arity::AtLeast(b), Arity::Exactly(a)) => a >= b,
            (Arity::AtLeast(_), Arity::AtLeast(_)) => true,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Exactly(k) => write!(f, "{k}"),
            Arity::AtLeast(k) => write!(f, "{k}+"),
        }
    }
}

/// How an instruction becomes an equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Template {
    /// `Get`: contributes an answer target, no equation.
    Target,
    /// All but the last operand sum to the last.
    Sum,
    /// All but the last operand multiply to the last.
    Product,
    /// An equation over the placeholders `a`..`d`.
    Formula(Equation),
}

impl Template {
    /// Instantiates the template with operand expressions. `None` for
    /// [`Template::Target`].
    pub fn instantiate(&self, args: &[Expr]) -> Option<Equation> {
        match self {
            Template::Target => None,
            Template::Sum => {
                let (last, rest) = args.split_last()?;
                Some(Equation::new(Expr::add(rest.to_vec()), last.clone()))
            }
            Template::Product => {
                let (last, rest) = args.split_last()?;
                Some(Equation::new(Expr::mul(rest.to_vec()), last.clone()))
            }
            Template::Formula(eq) => {
                let env: Environment = PLACEHOLDERS
                    .iter()
                    .zip(args)
                    .map(|(p, a)| (Symbol::new(*p), a.clone()))
                    .collect();
                Some(eq.substitute(&env))
            }
        }
    }
}

/// One registry record: an operator form with a fixed arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub arity: Arity,
    /// Template text as written in the registry; doubles as the template id.
    pub template_id: String,
    pub template: Template,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorSpec {
    pub name: String,
    pub forms: Vec<Form>,
}

impl OperatorSpec {
    pub fn form_for(&self, n: usize) -> Option<&Form> {
        self.forms.iter().find(|f| f.arity.accepts(n))
    }

    pub fn accepts(&self, n: usize) -> bool {
        self.form_for(n).is_some()
    }

    pub fn min_arity(&self) -> usize {
        self.forms.iter().map(|f| f.arity.min()).min().unwrap_or(0)
    }

    /// Accepted arities, e.g. `2|3` or `3+`.
    pub fn arity_text(&self) -> String {
        let parts: Vec<String> = self.forms.iter().map(|f| format!("{}", f.arity)).collect();
        parts.join("|")
    }

    pub fn is_target(&self) -> bool {
        self.forms.iter().any(|f| f.template == Template::Target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registry {
    ops: Vec<OperatorSpec>,
    records: usize,
}

impl Registry {
    /// The registry shipped with the crate.
    pub fn bundled() -> Registry {
        Registry::parse(BUNDLED).expect("bundled registry is valid")
    }

    /// Parses a registry table. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Registry, LangError> {
        let mut reg = Registry { ops: Vec::new(), records: 0 };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| LangError::Registry { line: line_no, message };
            let cols: Vec<&str> = line.split('|').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 columns, found {}", cols.len())));
            }
            let name = cols[0];
            if !is_operator_name(name) || super::Operand::parse(name).is_some() {
                return Err(err(format!("invalid operator name `{name}`")));
            }
            let arity = parse_arity(cols[1]).ok_or_else(|| err(format!("invalid arity `{}`", cols[1])))?;
            let template = parse_template(cols[2], arity).map_err(err)?;
            let form = Form {
                arity,
                template_id: cols[2].to_owned(),
                template,
                description: cols[3].to_owned(),
            };
            match reg.ops.iter_mut().find(|o| o.name == name) {
                Some(op) => {
                    if op.forms.iter().any(|f| f.arity.overlaps(arity)) {
                        return Err(err(format!("arity {arity} of `{name}` declared twice")));
                    }
                    op.forms.push(form);
                }
                None => reg.ops.push(OperatorSpec { name: name.to_owned(), forms: alloc::vec![form] }),
            }
            reg.records += 1;
        }
        Ok(reg)
    }

    pub fn get(&self, name: &str) -> Option<&OperatorSpec> {
        self.ops.iter().find(|o| o.name == name)
    }

    /// Number of records (operator forms).
    pub fn len(&self) -> usize {
        self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records == 0
    }

    pub fn operators(&self) -> impl Iterator<Item = &OperatorSpec> {
        self.ops.iter()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::bundled()
    }
}

/// Looks an operator up by exact (case-sensitive) name.
pub fn lookup_operator<'r>(registry: &'r Registry, name: &str) -> Result<&'r OperatorSpec, LangError> {
    registry
        .get(name)
        .ok_or_else(|| LangError::UnknownOperator { token: name.to_owned(), position: None })
}

/// Shape of operator tokens: a capital letter, then letters, digits or `_`.
pub(crate) fn is_operator_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_arity(s: &str) -> Option<Arity> {
    let (digits, open) = match s.strip_suffix('+') {
        Some(d) => (d, true),
        None => (s, false),
    };
    let k: usize = digits.parse().ok()?;
    if k == 0 {
        return None;
    }
    Some(if open { Arity::AtLeast(k) } else { Arity::Exactly(k) })
}

fn parse_template(s: &str, arity: Arity) -> Result<Template, String> {
    match s {
        "target" => {
            return match arity {
                Arity::Exactly(1) => Ok(Template::Target),
                _ => Err(String::from("`target` takes exactly one operand")),
            }
        }
        "sum" | "product" => {
            if arity.min() < 2 {
                return Err(format!("`{s}` needs at least two operands"));
            }
            return Ok(if s == "sum" { Template::Sum } else { Template::Product });
        }
        _ => {}
    }
    let Arity::Exactly(k) = arity else {
        return Err(String::from("formula templates need a fixed arity"));
    };
    if k > PLACEHOLDERS.len() {
        return Err(format!("formula templates take at most {} operands", PLACEHOLDERS.len()));
    }
    let (lhs, rhs) = s.split_once('=').ok_or_else(|| String::from("formula needs `=`"))?;
    let lhs = parse_expr(lhs, Mode::Formula)?;
    let rhs = parse_expr(rhs, Mode::Formula)?;
    let eq = Equation::new(lhs, rhs);
    for sym in eq.free_symbols() {
        let pos = PLACEHOLDERS.iter().position(|p| *p == sym.name());
        if !matches!(pos, Some(p) if p < k) {
            return Err(format!("placeholder `{sym}` outside arity {k}"));
        }
    }
    Ok(Template::Formula(eq))
}
