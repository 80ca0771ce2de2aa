//! HTTP reward service.
//!
//! ```text
//! POST /v1/verify        {"response": "...", "truth": 51, "id": ...}
//!                        {"program": "...", "params": "...", "truth": 51, "id": ...}
//!                     -> {"id": ..., "reward": 1, "value": 51.0, "diagnostic": "Match", "elapsed_ms": 0.4}
//! POST /v1/verify_batch  [request, ...]  -> [reply, ...] in request order
//! GET  /healthz          {"status": "ok", "operators": 19}
//! ```
//!
//! A malformed body is a 400. A malformed program is a 200 with reward 0.
//! Inside a batch, an item that is not a valid request gets reward 0 and
//! diagnostic `ParseError` so positions stay aligned.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use geosolve_core::{Engine, Registry};
use serde_json::{json, Value};

use crate::wire::{VerifyReply, VerifyRequest};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_BATCH_CAP: usize = 1024;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(2);

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub port: u16,
    pub batch_cap: usize,
    pub timeout: Duration,
    pub engine: Engine,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            port: DEFAULT_PORT,
            batch_cap: DEFAULT_BATCH_CAP,
            timeout: DEFAULT_TIMEOUT,
            engine: Engine::bundled(),
        }
    }
}

impl ServiceConfig {
    /// Reads `PORT`, `BATCH_CAP`, `TIMEOUT_MS` and `REGISTRY_PATH`.
    pub fn from_env() -> anyhow::Result<ServiceConfig> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(var: impl Fn(&str) -> Option<String>) -> anyhow::Result<ServiceConfig> {
        use anyhow::Context;
        let mut cfg = ServiceConfig::default();
        if let Some(v) = var("PORT") {
            cfg.port = v.parse().with_context(|| format!("PORT={v}"))?;
        }
        if let Some(v) = var("BATCH_CAP") {
            cfg.batch_cap = v.parse().with_context(|| format!("BATCH_CAP={v}"))?;
        }
        if let Some(v) = var("TIMEOUT_MS") {
            let ms: u64 = v.parse().with_context(|| format!("TIMEOUT_MS={v}"))?;
            anyhow::ensure!(ms > 0, "TIMEOUT_MS must be positive");
            cfg.timeout = Duration::from_millis(ms);
        }
        if let Some(path) = var("REGISTRY_PATH") {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
            cfg.engine = Engine::new(Registry::parse(&text).with_context(|| format!("loading {path}"))?);
        }
        Ok(cfg)
    }
}

#[derive(Clone)]
struct AppState {
    engine: Arc<Engine>,
    batch_cap: usize,
    timeout: Duration,
}

pub fn router(cfg: &ServiceConfig) -> Router {
    let state = AppState { engine: Arc::new(cfg.engine.clone()), batch_cap: cfg.batch_cap, timeout: cfg.timeout };
    Router::new()
        .route("/healthz", get(healthz))
        .route("/v1/verify", post(verify))
        .route("/v1/verify_batch", post(verify_batch))
        .layer(DefaultBodyLimit::max(64 << 20))
        .with_state(state)
}

/// Binds and serves until ctrl-c.
pub async fn serve(cfg: ServiceConfig) -> anyhow::Result<()> {
    let app = router(&cfg);
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], cfg.port))).await?;
    eprintln!("listening on {} ({} operators)", listener.local_addr()?, cfg.engine.registry().len());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn bad_request(message: impl Into<String>) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({ "error": message.into() }))).into_response()
}

async fn healthz(State(st): State<AppState>) -> Json<Value> {
    Json(json!({ "status": "ok", "operators": st.engine.registry().len() }))
}

/// Verifies on the blocking pool; a timeout becomes an `UnsolvedSystem` reply.
async fn run_one(st: &AppState, req: VerifyRequest) -> VerifyReply {
    let engine = st.engine.clone();
    let id = req.id.clone();
    let start = Instant::now();
    let task = tokio::task::spawn_blocking(move || {
        let v = req.verify(&engine);
        VerifyReply::from_verdict(req.id, &v, 0.0)
    });
    // The blocking thread cannot be cancelled; a timed-out solve finishes
    // in the background and its result is dropped.
    // A result that lands after the deadline counts as timed out too, so the
    // verdict does not depend on which side of the race wins.
    let outcome = tokio::time::timeout(st.timeout, task).await;
    let elapsed = start.elapsed();
    let mut reply = match outcome {
        Ok(Ok(r)) if elapsed <= st.timeout => r,
        _ => VerifyReply { id, reward: 0, value: None, diagnostic: "UnsolvedSystem".into(), elapsed_ms: 0.0 },
    };
    reply.elapsed_ms = elapsed.as_secs_f64() * 1e3;
    reply
}

async fn verify(State(st): State<AppState>, body: Bytes) -> Response {
    let value: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return bad_request(format!("malformed JSON: {e}")),
    };
    match VerifyRequest::from_json(&value) {
        Ok(req) => Json(run_one(&st, req).await).into_response(),
        Err(e) => bad_request(e),
    }
}

async fn verify_batch(State(st): State<AppState>, body: Bytes) -> Response {
    let value: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return bad_request(format!("malformed JSON: {e}")),
    };
    let Value::Array(items) = value else {
        return bad_request("batch body must be a JSON array");
    };
    if items.len() > st.batch_cap {
        return (
            StatusCode::PAYLOAD_TOO_LARGE,
            Json(json!({ "error": format!("batch of {} exceeds cap {}", items.len(), st.batch_cap) })),
        )
            .into_response();
    }
    let mut tasks = Vec::with_capacity(items.len());
    for item in items {
        let st = st.clone();
        tasks.push(tokio::spawn(async move {
            match VerifyRequest::from_json(&item) {
                Ok(req) => run_one(&st, req).await,
                Err(_) => VerifyReply::malformed(item.get("id").cloned().unwrap_or(Value::Null)),
            }
        }));
    }
    let mut replies = Vec::with_capacity(tasks.len());
    for t in tasks {
        replies.push(t.await.unwrap_or_else(|_| VerifyReply::malformed(Value::Null)));
    }
    Json(replies).into_response()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_config() {
        let cfg = ServiceConfig::from_lookup(|k| match k {
            "PORT" => Some("9000".into()),
            "BATCH_CAP" => Some("8".into()),
            "TIMEOUT_MS" => Some("250".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!((cfg.port, cfg.batch_cap, cfg.timeout), (9000, 8, Duration::from_millis(250)));
        let cfg = ServiceConfig::from_lookup(|_| None).unwrap();
        assert_eq!((cfg.port, cfg.batch_cap, cfg.timeout), (8080, 1024, Duration::from_secs(2)));
        assert!(ServiceConfig::from_lookup(|k| (k == "PORT").then(|| "x".into())).is_err());
        assert!(ServiceConfig::from_lookup(|k| (k == "TIMEOUT_MS").then(|| "0".into())).is_err());
        assert!(ServiceConfig::from_lookup(|k| (k == "REGISTRY_PATH").then(|| "/nonexistent".into())).is_err());
    }
}
