//! Plain-text tables for the CLI.

use std::fmt::Write;

use geosolve_core::metrics::DifficultyBucket;

use crate::harness::{FilterReport, MetricsReport, OracleReport, Stratification, Stratum};

pub fn oracle_table(r: &OracleReport) -> String {
    let mut out = String::new();
    let width = r.outcomes.iter().map(|o| o.id.len()).max().unwrap_or(2).max(2);
    let _ = writeln!(out, "{:<width$}  {:<6}  {:>14}  {:>14}  diagnostic", "id", "result", "value", "truth");
    for o in &r.outcomes {
        let value = o.verdict.value.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<width$}  {:<6}  {:>14}  {:>14.6}  {}",
            o.id,
            if o.passed { "pass" } else { "FAIL" },
            value,
            o.verdict.truth,
            o.verdict.diagnostic
        );
    }
    for id in &r.skipped {
        let _ = writeln!(out, "{id:<width$}  skip    (no program)");
    }
    let _ = writeln!(out, "{}/{} passed in {:.1} ms", r.passed, r.total, r.elapsed_ms);
    if !r.failed.is_empty() {
        let _ = writeln!(out, "failed: {}", r.failed.join(", "));
    }
    out
}

fn stratum_row(out: &mut String, label: &str, s: &Stratum) {
    let _ = write!(out, "{label:<12} {:>6}", s.problems);
    for p in &s.pass_at {
        let _ = write!(out, " {:>7.3}", p);
    }
    out.push('\n');
}

pub fn metrics_table(m: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<12} {:>6}", "stratum", "n");
    for k in 1..=m.k {
        let _ = write!(out, " {:>7}", format!("pass@{k}"));
    }
    out.push('\n');
    stratum_row(&mut out, "all", &m.overall);
    for (split, s) in &m.by_split {
        stratum_row(&mut out, &format!("split {split}"), s);
    }
    for b in DifficultyBucket::ALL {
        if let Some(s) = m.by_difficulty.get(b.label()) {
            stratum_row(&mut out, &format!("ops {}", b.label()), s);
        }
    }
    out.push('\n');
    for (code, n) in &m.diagnostics {
        let _ = writeln!(out, "{code:<18} {n}");
    }
    for w in &m.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn filter_table(r: &FilterReport) -> String {
    let mut out = String::new();
    let total = r.accepted.len() + r.rejected.len();
    for (i, o) in r.rejected.iter().enumerate() {
        let id = o.candidate.id.clone().unwrap_or_else(|| format!("#{i}"));
        let _ = writeln!(out, "rejected {id}: {}", o.verdict.diagnostic);
    }
    let _ = writeln!(
        out,
        "accepted {}/{} ({:.1}%)",
        r.accepted.len(),
        total,
        100.0 * r.acceptance_ratio
    );
    out
}

pub fn stratification_table(s: &Stratification) -> String {
    let mut out = String::new();
    for b in DifficultyBucket::ALL {
        let n = s.buckets.get(&b).map_or(0, Vec::len);
        let _ = writeln!(out, "ops {:<4} {n}", b.label());
    }
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn metrics_layout() {
        let m = MetricsReport {
            k: 2,
            overall: Stratum { problems: 2, pass_at: vec![0.0, 0.5] },
            by_split: BTreeMap::new(),
            by_difficulty: [(">=6".to_string(), Stratum { problems: 1, pass_at: vec![0.0, 1.0] })].into(),
            diagnostics: [("Match".to_string(), 1)].into(),
            warnings: vec![],
        };
        let t = metrics_table(&m);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "stratum           n  pass@1  pass@2");
        assert_eq!(lines[1], "all               2   0.000   0.500");
        assert_eq!(lines[2], "ops >=6           1   0.000   1.000");
    }
}
