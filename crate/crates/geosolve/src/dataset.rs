//! JSONL ingestion for problem records, sample files and synthesis candidates.
//!
//! Problem record schema, one object per line:
//!
//! ```text
//! {"id": "...", "question": "...", "answer": 51, "program": "...", "params": "...",
//!  "choices": [3.1, 4.2], "answer_choice": "B", "split": "pgps9k", "image": "img/1.png"}
//! ```
//!
//! `answer` may be omitted when `choices` and `answer_choice` are present;
//! `answer_choice` is a letter (`"A"` is the first choice) or a zero-based index.
//! For PGPS9K-style sources map `diagram` to `image`, the annotated solution
//! program to `program` and the variable table to `params` (`N0=.., N1=..`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemRecord {
    pub id: String,
    pub question: String,
    pub answer: f64,
    pub program: Option<String>,
    pub params: Option<String>,
    pub choices: Option<Vec<f64>>,
    pub split: String,
    /// Diagram path, carried through but never opened.
    pub image_ref: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub id: String,
    pub responses: Vec<String>,
}

/// A response to check against a truth. Either `response` or `program` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    pub truth: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: Value,
    #[serde(default)]
    question: String,
    answer: Option<f64>,
    program: Option<String>,
    params: Option<String>,
    choices: Option<Vec<f64>>,
    answer_choice: Option<Value>,
    #[serde(default)]
    split: Option<String>,
    #[serde(default, alias = "image_ref")]
    image: Option<String>,
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
}

/// Non-blank lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_line<T: serde::de::DeserializeOwned>(line: usize, text: &str) -> Result<T, DatasetError> {
    serde_json::from_str(text).map_err(|e| DatasetError::Schema { line, message: e.to_string() })
}

fn choice_index(v: &Value) -> Option<usize> {
    match v {
        Value::Number(n) => n.as_u64().map(|n| n as usize),
        Value::String(s) => {
            let s = s.trim();
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_alphabetic() => Some((c.to_ascii_uppercase() as u8 - b'A') as usize),
                _ => s.parse().ok(),
            }
        }
        _ => None,
    }
}

fn record(line: usize, raw: RawRecord) -> Result<ProblemRecord, DatasetError> {
    let err = |message: String| DatasetError::Schema { line, message };
    let id = match raw.id {
        Value::String(s) if !s.is_empty() => s,
        Value::Number(n) => n.to_string(),
        _ => return Err(err("`id` must be a non-empty string or a number".into())),
    };
    let from_choice = match (&raw.choices, &raw.answer_choice) {
        (Some(choices), Some(label)) => {
            let idx = choice_index(label).ok_or_else(|| err(format!("bad answer_choice {label}")))?;
            Some(*choices.get(idx).ok_or_else(|| err(format!("answer_choice {label} out of range")))?)
        }
        (None, Some(_)) => return Err(err("answer_choice without choices".into())),
        _ => None,
    };
    let answer = raw.answer.or(from_choice).ok_or_else(|| err("missing field `answer`".into()))?;
    if !answer.is_finite() {
        return Err(err("`answer` is not finite".into()));
    }
    if raw.program.is_some() && raw.params.is_none() {
        return Err(err("record has a program but no params".into()));
    }
    Ok(ProblemRecord {
        id,
        question: raw.question,
        answer,
        program: raw.program,
        params: raw.params,
        choices: raw.choices,
        split: raw.split.unwrap_or_else(|| "default".into()),
        image_ref: raw.image,
    })
}

pub fn parse_dataset(text: &str) -> Result<Vec<ProblemRecord>, DatasetError> {
    let mut out: Vec<ProblemRecord> = Vec::new();
    for (n, l) in lines(text) {
        let rec = record(n, parse_line(n, l)?)?;
        if out.iter().any(|r| r.id == rec.id) {
            return Err(DatasetError::Schema { line: n, message: format!("duplicate id {}", rec.id) });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<ProblemRecord>, DatasetError> {
    parse_dataset(&read(path.as_ref())?)
}

pub fn parse_samples(text: &str) -> Result<Vec<SampleSet>, DatasetError> {
    lines(text).map(|(n, l)| parse_line(n, l)).collect()
}

pub fn load_samples(path: impl AsRef<Path>) -> Result<Vec<SampleSet>, DatasetError> {
    parse_samples(&read(path.as_ref())?)
}

pub fn parse_candidates(text: &str) -> Result<Vec<Candidate>, DatasetError> {
    lines(text)
        .map(|(n, l)| {
            let c: Candidate = parse_line(n, l)?;
            if c.response.is_some() == c.program.is_some() {
                return Err(DatasetError::Schema {
                    line: n,
                    message: "exactly one of `response` and `program` is required".into(),
                });
            }
            Ok(c)
        })
        .collect()
}

pub fn load_candidates(path: impl AsRef<Path>) -> Result<Vec<Candidate>, DatasetError> {
    parse_candidates(&read(path.as_ref())?)
}
