//! Dataset harness and reward service around [`geosolve_core`].

pub mod dataset;
pub mod harness;
pub mod report;
pub mod service;
pub mod wire;

pub use geosolve_core as core;

pub use dataset::{load_candidates, load_dataset, load_samples, Candidate, DatasetError, ProblemRecord, SampleSet};
pub use harness::{
    filter_synthetic, run_oracle_check, score_samples, stratify_by_operators, FilterReport, MetricsReport,
    OracleReport, ScoreError, Stratification,
};
pub use service::{router, serve, ServiceConfig};
pub use wire::{VerdictRecord, VerifyReply, VerifyRequest};
