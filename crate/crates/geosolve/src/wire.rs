//! JSON shapes shared by the CLI reports and the `/v1` service.

use geosolve_core::{Engine, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A [`Verdict`] as logged and exchanged: `{reward, value, truth, diagnostic, program, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub reward: u8,
    pub value: Option<f64>,
    pub truth: f64,
    pub diagnostic: String,
    pub program: String,
    pub params: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        VerdictRecord {
            reward: v.reward,
            value: v.value,
            truth: v.truth,
            diagnostic: v.diagnostic.to_string(),
            program: v.program.clone(),
            params: v.params.clone(),
            detail: v.detail.clone(),
        }
    }
}

/// What a request asks to verify.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Response(String),
    Program { program: String, params: String },
}

/// One `/v1/verify` item after validation.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRequest {
    pub id: Value,
    pub payload: Payload,
    pub truth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReply {
    pub id: Value,
    pub reward: u8,
    pub value: Option<f64>,
    pub diagnostic: String,
    pub elapsed_ms: f64,
}

impl VerifyReply {
    pub fn from_verdict(id: Value, v: &Verdict, elapsed_ms: f64) -> VerifyReply {
        VerifyReply { id, reward: v.reward, value: v.value, diagnostic: v.diagnostic.to_string(), elapsed_ms }
    }

    /// Reply for a batch item that is not a valid request.
    pub fn malformed(id: Value) -> VerifyReply {
        VerifyReply { id, reward: 0, value: None, diagnostic: "ParseError".into(), elapsed_ms: 0.0 }
    }
}

fn text_field(obj: &Map<String, Value>, key: &str) -> Result<Option<String>, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(format!("`{key}` must be a string")),
    }
}

impl VerifyRequest {
    /// Checks the request shape. The error text goes back in a 400 body.
    pub fn from_json(v: &Value) -> Result<VerifyRequest, String> {
        let Value::Object(obj) = v else {
            return Err("request must be a JSON object".into());
        };
        for key in obj.keys() {
            if !matches!(key.as_str(), "id" | "response" | "program" | "params" | "truth") {
                return Err(format!("unknown field `{key}`"));
            }
        }
        let truth = match obj.get("truth") {
            Some(Value::Number(n)) => n.as_f64().ok_or("`truth` is out of range")?,
            Some(_) => return Err("`truth` must be a number".into()),
            None => return Err("missing field `truth`".into()),
        };
        let response = text_field(obj, "response")?;
        let program = text_field(obj, "program")?;
        let params = text_field(obj, "params")?;
        let payload = match (response, program) {
            (Some(r), None) if params.is_none() => Payload::Response(r),
            (None, Some(program)) => Payload::Program { program, params: params.unwrap_or_default() },
            (None, None) => return Err("one of `response` or `program` is required".into()),
            _ => return Err("`response` cannot be combined with `program`/`params`".into()),
        };
        Ok(VerifyRequest { id: obj.get("id").cloned().unwrap_or(Value::Null), payload, truth })
    }

    pub fn verify(&self, engine: &Engine) -> Verdict {
        match &self.payload {
            Payload::Response(r) => engine.verify_response(r, self.truth),
            Payload::Program { program, params } => engine.verify_program(program, params, self.truth),
        }
    }
}
