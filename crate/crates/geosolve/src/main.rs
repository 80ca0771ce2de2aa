use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use geosolve::core::{DiagnosticCode, Engine, Registry, RootPolicy};
use geosolve::harness::{self, stratify_by_operators};
use geosolve::{dataset, report, service, VerdictRecord};
use serde::Serialize;
use serde_json::json;

/// Execute and verify geometric operator programs.
#[derive(Parser)]
#[command(name = "geosolve", version)]
struct Cli {
    /// Treat gaps in N/V numbering as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// How to pick among several real roots.
    #[arg(long, global = true, value_enum, default_value_t = Policy::Nonneg)]
    policy: Policy,
    /// Operator table to use instead of the bundled one.
    #[arg(long, global = true, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Also write the structured JSON report here.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Nonneg,
    Unique,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program and print its answer.
    Exec {
        program: String,
        #[arg(long, default_value = "")]
        params: String,
        /// Print the per-instruction solve trace.
        #[arg(long)]
        trace: bool,
    },
    /// Verify a model response (or a bare program) against a truth.
    Verify {
        /// Response text; `-` reads stdin.
        #[arg(long, value_name = "FILE", conflicts_with = "program", required_unless_present = "program")]
        response_file: Option<PathBuf>,
        #[arg(long)]
        program: Option<String>,
        #[arg(long, default_value = "", requires = "program")]
        params: String,
        #[arg(long, allow_negative_numbers = true)]
        truth: f64,
    },
    /// Check that every record's own program reproduces its answer.
    OracleCheck { dataset: PathBuf },
    /// Pass@k over a file of sampled responses.
    Score {
        dataset: PathBuf,
        samples: PathBuf,
        #[arg(long)]
        k: usize,
        /// Add per-difficulty rows.
        #[arg(long)]
        stratify: bool,
    },
    /// Keep candidates whose program reproduces their truth.
    Filter {
        candidates: PathBuf,
        /// Write accepted candidates here as JSONL.
        #[arg(long, value_name = "FILE")]
        accepted_out: Option<PathBuf>,
    },
    /// Count records per operator-count bucket.
    Stratify { dataset: PathBuf },
    /// Run the HTTP reward service (PORT, BATCH_CAP, TIMEOUT_MS, REGISTRY_PATH).
    Serve {
        #[arg(long, env = "PORT")]
        port: Option<u16>,
    },
}

const CHECK_FAILED: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

fn engine(cli: &Cli) -> anyhow::Result<Engine> {
    let registry = match &cli.registry {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Registry::parse(&text).with_context(|| format!("loading {}", path.display()))?
        }
        None => Registry::bundled(),
    };
    let policy = match cli.policy {
        Policy::Nonneg => RootPolicy::NonnegativePreferred,
        Policy::Unique => RootPolicy::StrictUnique,
    };
    Ok(Engine::new(registry).with_policy(policy).with_strict(cli.strict))
}

fn write_report<T: Serialize>(cli: &Cli, value: &T) -> anyhow::Result<()> {
    if let Some(path) = &cli.report {
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let engine = engine(cli)?;
    match &cli.command {
        Command::Exec { program, params, trace } => match engine.run(program, params) {
            Ok(r) => {
                println!("{}", r.answer);
                if r.answer_expr.as_rational().is_none() {
                    println!("exact: {}", r.answer_expr);
                }
                for w in &r.warnings {
                    eprintln!("warning: {w}");
                }
                if *trace {
                    print!("{}", r.trace);
                }
                write_report(
                    cli,
                    &json!({
                        "answer": r.answer,
                        "exact": r.answer_expr.to_string(),
                        "warnings": r.warnings,
                        "trace": r.trace.to_string(),
                    }),
                )?;
                Ok(0)
            }
            Err(e) => {
                let code = DiagnosticCode::from(&e);
                eprintln!("{code}: {e}");
                write_report(cli, &json!({ "diagnostic": code.as_str(), "detail": e.to_string() }))?;
                Ok(CHECK_FAILED)
            }
        },
        Command::Verify { response_file, program, params, truth } => {
            let v = match (response_file, program) {
                (Some(path), _) => engine.verify_response(&read_text(path)?, *truth),
                (None, Some(p)) => engine.verify_program(p, params, *truth),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let rec = VerdictRecord::from(&v);
            println!("{}", serde_json::to_string(&rec)?);
            if !v.detail.is_empty() {
                eprintln!("{}", v.detail);
            }
            write_report(cli, &rec)?;
            Ok(if v.is_match() { 0 } else { CHECK_FAILED })
        }
        Command::OracleCheck { dataset } => {
            let records = dataset::load_dataset(dataset)?;
            let r = harness::run_oracle_check(&engine, &records);
            print!("{}", report::oracle_table(&r));
            write_report(cli, &r)?;
            Ok(if r.all_passed() { 0 } else { CHECK_FAILED })
        }
        Command::Score { dataset, samples, k, stratify } => {
            let records = dataset::load_dataset(dataset)?;
            let samples = dataset::load_samples(samples)?;
            let m = harness::score_samples(&engine, &records, &samples, *k, *stratify)?;
            print!("{}", report::metrics_table(&m));
            write_report(cli, &m)?;
            Ok(0)
        }
        Command::Filter { candidates, accepted_out } => {
            let cands = dataset::load_candidates(candidates)?;
            let r = harness::filter_synthetic(&engine, &cands);
            print!("{}", report::filter_table(&r));
            if let Some(path) = accepted_out {
                let mut text = String::new();
                for o in &r.accepted {
                    text += &serde_json::to_string(&o.candidate)?;
                    text.push('\n');
                }
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            write_report(cli, &r)?;
            Ok(0)
        }
        Command::Stratify { dataset } => {
            let records = dataset::load_dataset(dataset)?;
            let s = stratify_by_operators(&engine, &records);
            print!("{}", report::stratification_table(&s));
            write_report(cli, &s)?;
            Ok(0)
        }
        Command::Serve { port } => {
            let mut cfg = service::ServiceConfig::from_env()?;
            if cli.registry.is_some() || cli.strict || !matches!(cli.policy, Policy::Nonneg) {
                cfg.engine = engine;
            }
            if let Some(p) = port {
                cfg.port = *p;
            }
            tokio::runtime::Runtime::new()?.block_on(service::serve(cfg))?;
            Ok(0)
        }
    }
}
