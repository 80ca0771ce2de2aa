use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Operand, ParamSet, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FindingCode {
    /// A problem operand with no parameter binding.
    UnboundOperand,
    /// An operand of a kind the operator cannot take, such as `Get C3`.
    ImpossibleOperand,
    /// `N`/`V` indices that do not run 0, 1, 2, ...
    NonSequentialNumbering,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub code: FindingCode,
    pub instruction: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
    pub strict_mode: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Static checks on a parsed program. Numbering problems are warnings unless
/// `strict` is set.
pub fn validate(p: &Program, params: &ParamSet, strict: bool) -> ValidationReport {
    let mut report = ValidationReport { strict_mode: strict, ..Default::default() };
    let mut first_n: BTreeMap<u32, usize> = BTreeMap::new();
    let mut first_v: BTreeMap<u32, usize> = BTreeMap::new();
    let mut reported_unbound: BTreeSet<u32> = BTreeSet::new();

    for (idx, ins) in p.instructions.iter().enumerate() {
        for a in &ins.args {
            match a {
                Operand::Problem(i) => {
                    if params.get(*i).is_none() && reported_unbound.insert(*i) {
                        report.errors.push(Finding {
                            code: FindingCode::UnboundOperand,
                            instruction: idx,
                            message: format!("N{i} has no parameter binding"),
                        });
                    }
                    first_n.entry(*i).or_insert(idx);
                }
                Operand::Process(i) => {
                    first_v.entry(*i).or_insert(idx);
                }
                Operand::Constant(_) if ins.is_get() => report.errors.push(Finding {
                    code: FindingCode::ImpossibleOperand,
                    instruction: idx,
                    message: format!("`{ins}` targets a constant"),
                }),
                Operand::Constant(_) => {}
            }
        }
    }
    let mut numbering = gaps(&first_n, 'N');
    numbering.extend(gaps(&first_v, 'V'));
    if strict {
        report.errors.extend(numbering);
    } else {
        report.warnings.extend(numbering);
    }
    report
}

/// One finding per index skipped below the largest one used.
fn gaps(first_use: &BTreeMap<u32, usize>, kind: char) -> Vec<Finding> {
    let Some(&max) = first_use.keys().next_back() else { return Vec::new() };
    (0..max)
        .filter(|k| !first_use.contains_key(k))
        .map(|k| {
            let instruction = first_use.range(k..).map(|(_, &at)| at).min().unwrap_or(0);
            Finding {
                code: FindingCode::NonSequentialNumbering,
                instruction,
                message: format!("{kind}{k} is skipped"),
            }
        })
        .collect()
}
