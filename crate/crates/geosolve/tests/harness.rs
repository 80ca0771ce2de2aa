use std::path::PathBuf;

use geosolve::core::metrics::DifficultyBucket;
use geosolve::core::Engine;
use geosolve::{
    load_dataset, run_oracle_check, score_samples, stratify_by_operators, DatasetError, ProblemRecord, SampleSet,
};
use proptest::prelude::*;

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/fixture.jsonl")
}

fn fixture() -> Vec<ProblemRecord> {
    load_dataset(fixture_path()).unwrap()
}

fn boxed(r: &ProblemRecord) -> String {
    format!("\\boxed{{{}}}\n\\boxed{{{}}}", r.program.as_deref().unwrap(), r.params.as_deref().unwrap())
}

#[test]
fn fixture_loads() {
    let records = fixture();
    assert_eq!(records.len(), 25);
    assert!(records.iter().all(|r| r.program.is_some() && r.params.is_some()));
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_dataset("/nonexistent/x.jsonl"), Err(DatasetError::Io { .. })));
}

#[test]
fn fixture_self_verifies() {
    let r = run_oracle_check(&Engine::bundled(), &fixture());
    assert_eq!((r.total, r.passed), (25, 25), "{:?}", r.failed);
}

#[test]
fn perturbed_answer_is_reported() {
    let mut records = fixture();
    records[3].answer += 1.0;
    let r = run_oracle_check(&Engine::bundled(), &records);
    assert_eq!(r.passed, 24);
    assert_eq!(r.failed, [records[3].id.clone()]);
    assert!(!r.all_passed());
}

#[test]
fn rotating_correct_response() {
    // response j of problem i is the ground truth iff j == i mod k
    let records = fixture();
    let k = 5;
    let samples: Vec<SampleSet> = records
        .iter()
        .enumerate()
        .map(|(i, r)| SampleSet {
            id: r.id.clone(),
            responses: (0..k)
                .map(|j| if j == i % k { boxed(r) } else { String::from("\\boxed{Get V9}") })
                .collect(),
        })
        .collect();
    let m = score_samples(&Engine::bundled(), &records, &samples, k, true).unwrap();
    assert_eq!(m.overall.pass_at[k - 1], 1.0);
    assert_eq!(m.overall.pass_at[0], 1.0 / k as f64);
    for s in m.by_split.values().chain(m.by_difficulty.values()) {
        assert!(s.pass_at.windows(2).all(|w| w[0] <= w[1]));
    }
    assert_eq!(m.diagnostics["Match"], records.len());
    assert_eq!(m.diagnostics["UnsolvedSystem"], records.len() * (k - 1));
}

#[test]
fn empty_responses_score_zero() {
    let records = fixture();
    let samples: Vec<SampleSet> =
        records.iter().map(|r| SampleSet { id: r.id.clone(), responses: vec![String::new(); 3] }).collect();
    let m = score_samples(&Engine::bundled(), &records, &samples, 3, false).unwrap();
    assert_eq!(m.overall.pass_at, [0.0, 0.0, 0.0]);
    assert_eq!(m.diagnostics["NoBoxedAnswer"], 75);
}

#[test]
fn fixture_strata() {
    let records = fixture();
    let s = stratify_by_operators(&Engine::bundled(), &records);
    let of = |id: &str| s.buckets.iter().find(|(_, ids)| ids.iter().any(|i| i == id)).map(|(b, _)| *b);
    assert_eq!(of("angle-supplementary"), Some(DifficultyBucket::UpTo2));
    assert_eq!(of("triangle-in-circle-shaded"), Some(DifficultyBucket::SixPlus));
    assert_eq!(s.buckets.values().map(Vec::len).sum::<usize>(), 25);
    assert!(s.warnings.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scoring_ignores_problem_order(
        correct in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 25),
        order in Just((0..25usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let records = fixture();
        let samples: Vec<SampleSet> = records
            .iter()
            .zip(&correct)
            .map(|(r, row)| SampleSet {
                id: r.id.clone(),
                responses: row.iter().map(|&c| if c { boxed(r) } else { String::new() }).collect(),
            })
            .collect();
        let shuffled: Vec<SampleSet> = order.iter().map(|&i| samples[i].clone()).collect();
        let shuffled_records: Vec<ProblemRecord> = order.iter().rev().map(|&i| records[i].clone()).collect();
        let engine = Engine::bundled();
        let a = score_samples(&engine, &records, &samples, 3, true).unwrap();
        let b = score_samples(&engine, &shuffled_records, &shuffled, 3, true).unwrap();
        prop_assert_eq!(a, b);
    }
}
