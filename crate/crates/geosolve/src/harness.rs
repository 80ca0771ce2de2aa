//! Batch operations over datasets: oracle self-check, Pass@k scoring,
//! synthesis filtering and difficulty stratification.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use geosolve_core::metrics::{pass_at_k, DifficultyBucket};
use geosolve_core::{DiagnosticCode, Engine, Verdict};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Candidate, ProblemRecord, SampleSet};
use crate::wire::VerdictRecord;

#[derive(Clone, Debug, Serialize)]
pub struct OracleOutcome {
    pub id: String,
    pub passed: bool,
    pub verdict: VerdictRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub total: usize,
    pub passed: usize,
    /// Ids of records whose own program does not reproduce their answer.
    pub failed: Vec<String>,
    /// Ids of records without a program; they are not counted.
    pub skipped: Vec<String>,
    pub outcomes: Vec<OracleOutcome>,
    pub elapsed_ms: f64,
}

impl OracleReport {
    /// Vacuously true for an empty dataset.
    pub fn all_passed(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Runs every record's ground-truth program against its own answer.
pub fn run_oracle_check(engine: &Engine, records: &[ProblemRecord]) -> OracleReport {
    let start = Instant::now();
    let outcomes: Vec<Option<OracleOutcome>> = records
        .par_iter()
        .map(|r| {
            let program = r.program.as_deref()?;
            let v = engine.verify_program(program, r.params.as_deref().unwrap_or(""), r.answer);
            Some(OracleOutcome { id: r.id.clone(), passed: v.is_match(), verdict: (&v).into() })
        })
        .collect();
    let skipped = records
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| o.is_none())
        .map(|(r, _)| r.id.clone())
        .collect();
    let outcomes: Vec<OracleOutcome> = outcomes.into_iter().flatten().collect();
    OracleReport {
        total: outcomes.len(),
        passed: outcomes.iter().filter(|o| o.passed).count(),
        failed: outcomes.iter().filter(|o| !o.passed).map(|o| o.id.clone()).collect(),
        skipped,
        outcomes,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("sample set {0} has no matching record")]
    MissingRecord(String),
    #[error("sample set {id} has {found} responses, {k} required")]
    InsufficientSamples { id: String, found: usize, k: usize },
    #[error("sample set {0} appears more than once")]
    DuplicateSamples(String),
    #[error("k must be at least 1")]
    ZeroK,
}

/// Pass@k for one stratum; `pass_at[j]` is Pass@(j+1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stratum {
    pub problems: usize,
    pub pass_at: Vec<f64>,
}

impl Stratum {
    fn of(rows: &[&Vec<bool>], k: usize) -> Stratum {
        Stratum { problems: rows.len(), pass_at: (1..=k).map(|j| pass_at_k(rows, j)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub k: usize,
    pub overall: Stratum,
    pub by_split: BTreeMap<String, Stratum>,
    /// Keyed by bucket label; empty unless stratification was requested.
    pub by_difficulty: BTreeMap<String, Stratum>,
    /// Diagnostic counts over every scored response.
    pub diagnostics: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

/// Scores the first `k` responses of every sample set.
///
/// Aggregation only counts, so the result does not depend on the order of
/// `samples` or `records`.
pub fn score_samples(
    engine: &Engine,
    records: &[ProblemRecord],
    samples: &[SampleSet],
    k: usize,
    stratify: bool,
) -> Result<MetricsReport, ScoreError> {
    if k == 0 {
        return Err(ScoreError::ZeroK);
    }
    let by_id: HashMap<&str, &ProblemRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut seen = std::collections::HashSet::new();
    let mut jobs = Vec::with_capacity(samples.len());
    for s in samples {
        let rec = *by_id.get(s.id.as_str()).ok_or_else(|| ScoreError::MissingRecord(s.id.clone()))?;
        if !seen.insert(s.id.as_str()) {
            return Err(ScoreError::DuplicateSamples(s.id.clone()));
        }
        if s.responses.len() < k {
            return Err(ScoreError::InsufficientSamples { id: s.id.clone(), found: s.responses.len(), k });
        }
        jobs.push((rec, &s.responses[..k]));
    }

    let verdicts: Vec<Vec<DiagnosticCode>> = jobs
        .par_iter()
        .map(|(rec, responses)| {
            responses.iter().map(|r| engine.verify_response(r, rec.answer).diagnostic).collect()
        })
        .collect();
    let rows: Vec<Vec<bool>> = verdicts
        .iter()
        .map(|v| v.iter().map(|d| *d == DiagnosticCode::Match).collect())
        .collect();

    let mut diagnostics = BTreeMap::new();
    for d in verdicts.iter().flatten() {
        *diagnostics.entry(d.to_string()).or_insert(0) += 1;
    }

    let mut splits: BTreeMap<&str, Vec<&Vec<bool>>> = BTreeMap::new();
    for ((rec, _), row) in jobs.iter().zip(&rows) {
        splits.entry(rec.split.as_str()).or_default().push(row);
    }

    let mut warnings = Vec::new();
    let mut by_difficulty = BTreeMap::new();
    if stratify {
        let mut buckets: BTreeMap<DifficultyBucket, Vec<&Vec<bool>>> = BTreeMap::new();
        for ((rec, _), row) in jobs.iter().zip(&rows) {
            match bucket_of(engine, rec) {
                Ok(b) => buckets.entry(b).or_default().push(row),
                Err(w) => warnings.push(w),
            }
        }
        warnings.sort();
        by_difficulty = buckets.iter().map(|(b, rs)| (b.label().to_string(), Stratum::of(rs, k))).collect();
    }

    let all: Vec<&Vec<bool>> = rows.iter().collect();
    Ok(MetricsReport {
        k,
        overall: Stratum::of(&all, k),
        by_split: splits.iter().map(|(s, rs)| (s.to_string(), Stratum::of(rs, k))).collect(),
        by_difficulty,
        diagnostics,
        warnings,
    })
}

fn bucket_of(engine: &Engine, rec: &ProblemRecord) -> Result<DifficultyBucket, String> {
    let text = rec.program.as_deref().ok_or_else(|| format!("{}: no program, excluded from stratification", rec.id))?;
    let p = geosolve_core::parse_program(text, engine.registry())
        .map_err(|e| format!("{}: program does not parse ({e}), excluded from stratification", rec.id))?;
    Ok(DifficultyBucket::of(&p))
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub buckets: BTreeMap<DifficultyBucket, Vec<String>>,
    pub warnings: Vec<String>,
}

/// Groups record ids by non-`Get` operator count.
pub fn stratify_by_operators(engine: &Engine, records: &[ProblemRecord]) -> Stratification {
    let mut buckets: BTreeMap<DifficultyBucket, Vec<String>> = BTreeMap::new();
    let mut warnings = Vec::new();
    for r in records {
        match bucket_of(engine, r) {
            Ok(b) => buckets.entry(b).or_default().push(r.id.clone()),
            Err(w) => warnings.push(w),
        }
    }
    Stratification { buckets, warnings }
}

impl Serialize for Stratification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let buckets: BTreeMap<&str, &Vec<String>> = self.buckets.iter().map(|(b, ids)| (b.label(), ids)).collect();
        let mut st = s.serialize_struct("Stratification", 2)?;
        st.serialize_field("buckets", &buckets)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterOutcome {
    pub candidate: Candidate,
    pub verdict: VerdictRecord,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FilterReport {
    pub accepted: Vec<FilterOutcome>,
    pub rejected: Vec<FilterOutcome>,
    /// Accepted over total; 0 for no candidates.
    pub acceptance_ratio: f64,
}

pub fn verify_candidate(engine: &Engine, c: &Candidate) -> Verdict {
    match (&c.response, &c.program) {
        (Some(r), _) => engine.verify_response(r, c.truth),
        (None, Some(p)) => engine.verify_program(p, c.params.as_deref().unwrap_or(""), c.truth),
        (None, None) => engine.verify_response("", c.truth),
    }
}

/// Keeps candidates whose program reproduces their truth.
pub fn filter_synthetic(engine: &Engine, candidates: &[Candidate]) -> FilterReport {
    let verdicts: Vec<Verdict> = candidates.par_iter().map(|c| verify_candidate(engine, c)).collect();
    let mut report = FilterReport::default();
    for (c, v) in candidates.iter().zip(&verdicts) {
        let out = FilterOutcome { candidate: c.clone(), verdict: v.into() };
        if v.is_match() {
            report.accepted.push(out);
        } else {
            report.rejected.push(out);
        }
    }
    if !candidates.is_empty() {
        report.acceptance_ratio = report.accepted.len() as f64 / candidates.len() as f64;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, answer: f64, program: Option<&str>, params: &str, split: &str) -> ProblemRecord {
        ProblemRecord {
            id: id.into(),
            question: String::new(),
            answer,
            program: program.map(Into::into),
            params: program.map(|_| params.into()),
            choices: None,
            split: split.into(),
            image_ref: None,
        }
    }

    fn boxed(program: &str, params: &str) -> String {
        format!("\\boxed{{{program}}} \\boxed{{{params}}}")
    }

    #[test]
    fn oracle_check_reports_failures() {
        let engine = Engine::bundled();
        let records = vec![
            rec("ok", 5.0, Some("Gougu N0 N1 V0 Get V0"), "N0=3 N1=4", "a"),
            rec("off", 6.0, Some("Gougu N0 N1 V0 Get V0"), "N0=3 N1=4", "a"),
            rec("bare", 1.0, None, "", "a"),
        ];
        let r = run_oracle_check(&engine, &records);
        assert_eq!((r.total, r.passed), (2, 1));
        assert_eq!(r.failed, ["off"]);
        assert_eq!(r.skipped, ["bare"]);
        assert!(run_oracle_check(&engine, &[]).all_passed());
    }

    #[test]
    fn pass_at_k_from_definition() {
        let engine = Engine::bundled();
        let right = boxed("Gougu N0 N1 V0 Get V0", "N0=3 N1=4");
        let records = vec![rec("p", 5.0, None, "", "a"), rec("q", 7.0, None, "", "b")];
        let samples = vec![
            SampleSet { id: "p".into(), responses: vec!["nothing".into(), right.clone()] },
            SampleSet { id: "q".into(), responses: vec![right.clone(), String::new()] },
        ];
        let m = score_samples(&engine, &records, &samples, 2, false).unwrap();
        assert_eq!(m.overall.pass_at, [0.0, 0.5]);
        assert_eq!(m.by_split["a"].pass_at, [0.0, 1.0]);
        assert_eq!(m.diagnostics["NoBoxedAnswer"], 2);
        assert_eq!(m.diagnostics["NumericMismatch"], 1);
        assert_eq!(m.diagnostics["Match"], 1);
    }

    #[test]
    fn score_errors() {
        let engine = Engine::bundled();
        let records = vec![rec("p", 5.0, None, "", "a")];
        let short = vec![SampleSet { id: "p".into(), responses: vec![String::new()] }];
        assert_eq!(
            score_samples(&engine, &records, &short, 2, false).unwrap_err(),
            ScoreError::InsufficientSamples { id: "p".into(), found: 1, k: 2 }
        );
        let stray = vec![SampleSet { id: "z".into(), responses: vec![String::new()] }];
        assert_eq!(
            score_samples(&engine, &records, &stray, 1, false).unwrap_err(),
            ScoreError::MissingRecord("z".into())
        );
        assert_eq!(score_samples(&engine, &records, &short, 0, false).unwrap_err(), ScoreError::ZeroK);
    }

    #[test]
    fn stratification() {
        let engine = Engine::bundled();
        let records = vec![
            rec("angle", 51.0, Some("Sum N0 N1 C180 Sum N1 V0 C180 Get V0"), "", "a"),
            rec("bare", 1.0, None, "", "a"),
        ];
        let s = stratify_by_operators(&engine, &records);
        assert_eq!(s.buckets[&DifficultyBucket::UpTo2], ["angle"]);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].starts_with("bare"));
    }

    #[test]
    fn filtering() {
        let engine = Engine::bundled();
        assert_eq!(filter_synthetic(&engine, &[]).acceptance_ratio, 0.0);
        let cands = vec![
            Candidate {
                id: None,
                response: Some(boxed("Gougu N0 N1 V0 Get V0", "N0=3 N1=4")),
                program: None,
                params: None,
                truth: 5.0,
            },
            Candidate {
                id: None,
                response: Some(boxed("Solve N0 V0 Get V0", "N0=3")),
                program: None,
                params: None,
                truth: 3.0,
            },
        ];
        let r = filter_synthetic(&engine, &cands);
        assert_eq!(r.accepted.len(), 1);
        assert_eq!(r.rejected[0].verdict.diagnostic, "UnknownOperator");
        assert_eq!(r.acceptance_ratio, 0.5);
    }
}
