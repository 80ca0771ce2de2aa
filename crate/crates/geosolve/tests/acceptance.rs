//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Runs as a plain binary (`harness = false`).

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use geosolve::core::expr::{Equation, Expr, Rational};
use geosolve::core::lang::{Arity, Instruction, Operand, Program};
use geosolve::core::metrics::{pass_at_k, DifficultyBucket};
use geosolve::core::{
    compare_answer, eval_numeric, instantiate_equations, parse_params, parse_program, serialize_program,
    solve_system, DiagnosticCode, Engine, Registry, RootPolicy, Symbol,
};
use geosolve::{load_dataset, router, ServiceConfig};
use http_body_util::BodyExt;
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::{json, Value};
use tower::ServiceExt;

const HEXAGON: &str = "Circle_R_Area N0 V0 RNgon_L_Area C6 N0 V1 Sum V1 V2 V0 Get V2";
const ANGLE: &str = "Sum N0 N1 C180 Sum N1 V0 C180 Get V0";
const CHORD: &str = "Sum V0 N0 C180 Chord2_Ang V0 V1 N1 TanSec_Ang V2 V1 N1 Get V2";
const PARALLELOGRAM: &str = "Gougu V0 N2 N1 Para_Area N0 V0 V1 Get V1";
/// 15 * sqrt(120), computed with an independent float library before the build.
const PARALLELOGRAM_ORACLE: f64 = 164.31676725154983;
const EXAMPLE_ONE: &str = "Circle_R_Area N0 V0 RNgon_L_Area C3 N0 V1 RNgon_H_Area C3 V2 V1 \
                           Circle_R_Area V2 V3 Sum V1 V4 V0 Sum V3 V4 V5 Get V5";
const UNDEFINED_OPS_RESPONSE: &str = "4. Formal Language Solution:\\\\\n\
    \\boxed{\\texttt{Equal x + 3 9 Solve x Equal N0 + 3 V0 Set V0=9 Equal 30 V1 9 V2 9 V3}}\n\
    \\boxed{\\texttt{Solve V3}}\n\nwith parameter values:\\\\\n\\boxed{\\texttt{x=6 V0=9 V3=12}}\\\\\n";

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/fixture.jsonl")
}

fn hexagon(engine: &Engine) -> Outcome {
    let (p, ps) = engine.parse(HEXAGON, "N0=7").map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = engine.execute(&p, &ps).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    check(
        (r.answer - 26.632).abs() <= 1e-3 && took < Duration::from_millis(10),
        format!("value {:.6}, {:.2} ms", r.answer, took.as_secs_f64() * 1e3),
    )
}

fn angle(engine: &Engine) -> Outcome {
    let r = engine.run(ANGLE, "N0 = 3*x  N1 = 4*x + 61").map_err(|e| e.to_string())?;
    check((r.answer - 51.0).abs() <= 1e-9, format!("value {}", r.answer))
}

fn tolerance() -> Outcome {
    let reject = compare_answer(26.764, 26.632);
    let accept = compare_answer(26.632, 26.632);
    check(!reject && accept, format!("26.764 vs 26.632 -> {reject}, 26.632 vs 26.632 -> {accept}"))
}

fn chord(engine: &Engine) -> Outcome {
    let r = engine.run(CHORD, "N0=89, N1=137").map_err(|e| e.to_string())?;
    let v0 = eval_numeric(&Expr::Sym(Symbol::process(0)), &r.environment).map_err(|e| e.to_string())?;
    check(
        (r.answer - 46.0).abs() <= 1e-9 && (v0 - 91.0).abs() <= 1e-9,
        format!("value {}, V0 = {v0}", r.answer),
    )
}

fn parallelogram(engine: &Engine) -> Outcome {
    let r = engine.run(PARALLELOGRAM, "N0=15, N1=13, N2=7").map_err(|e| e.to_string())?;
    check(
        (r.answer - PARALLELOGRAM_ORACLE).abs() <= 1e-3,
        format!("value {}, oracle {PARALLELOGRAM_ORACLE}", r.answer),
    )
}

fn undefined_operators(engine: &Engine) -> Outcome {
    let v = engine.verify_response(UNDEFINED_OPS_RESPONSE, 12.0);
    check(
        v.reward == 0 && v.diagnostic == DiagnosticCode::UnknownOperator,
        format!("reward {}, {}: {}", v.reward, v.diagnostic, v.detail),
    )
}

fn oracle_check_cli() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_geosolve"))
        .arg("oracle-check")
        .arg(fixture_path())
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let summary = stdout.lines().find(|l| l.contains("passed in")).unwrap_or("no summary").to_string();
    check(
        out.status.success() && summary.starts_with("25/25") && took < Duration::from_secs(1),
        format!("{summary}, process {:.0} ms", took.as_secs_f64() * 1e3),
    )
}

fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map(|_| cases).map_err(|e| e.to_string())
}

fn operand() -> impl Strategy<Value = Operand> {
    prop_oneof![
        (0u32..=99).prop_map(Operand::Problem),
        (0u32..=99).prop_map(Operand::Process),
        (0i64..100_000, prop::sample::select(vec![1i64, 10, 100, 1000]))
            .prop_map(|(n, d)| Operand::Constant(Rational::new(BigInt::from(n), BigInt::from(d)))),
    ]
}

fn program_strategy(reg: &Registry) -> impl Strategy<Value = Program> {
    let mut forms = Vec::new();
    for op in reg.operators() {
        for f in &op.forms {
            forms.push((op.name.clone(), f.arity.min(), matches!(f.arity, Arity::AtLeast(_))));
        }
    }
    let instruction = prop::sample::select(forms).prop_flat_map(|(name, min, variadic)| {
        let count = if variadic { min..min + 4 } else { min..min + 1 };
        prop::collection::vec(operand(), count).prop_map(move |args| Instruction::new(name.clone(), args))
    });
    prop::collection::vec(instruction, 1..8).prop_map(Program::new)
}

fn round_trip() -> Outcome {
    let reg = Registry::bundled();
    let n = run_property(1000, program_strategy(&reg), |p| {
        let text = serialize_program(&p);
        let back = parse_program(&text, &reg).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serialize_program(&back), text);
        Ok(())
    })?;
    Ok(format!("{n} programs"))
}

fn residual_ok(eq: &Equation, env: &geosolve::core::Environment) -> Result<f64, String> {
    let l = eval_numeric(&eq.lhs, env).map_err(|e| e.to_string())?;
    let r = eval_numeric(&eq.rhs, env).map_err(|e| e.to_string())?;
    Ok((l - r).abs() / r.abs().max(1.0))
}

fn residuals(engine: &Engine) -> Outcome {
    let mut worst: f64 = 0.0;
    for rec in load_dataset(fixture_path()).map_err(|e| e.to_string())? {
        let program = parse_program(rec.program.as_deref().unwrap_or(""), engine.registry()).map_err(|e| e.to_string())?;
        let params = parse_params(rec.params.as_deref().unwrap_or("")).map_err(|e| e.to_string())?;
        let inst = instantiate_equations(&program, &params, engine.registry()).map_err(|e| e.to_string())?;
        let r = engine.execute(&program, &params).map_err(|e| e.to_string())?;
        for eq in &inst.equations {
            worst = worst.max(residual_ok(eq, &r.environment)?);
        }
    }
    // random triangular systems with one quadratic row
    let rows = prop::collection::vec(
        (prop::sample::select(vec![-7i64, -3, -1, 1, 2, 5]), prop::collection::vec(-9i64..=9, 6), -200i64..200),
        1..6,
    );
    let worst_random = std::cell::Cell::new(0.0f64);
    let n = run_property(500, (rows, 1i64..50), |(rows, square)| {
        let syms: Vec<Symbol> = (0..=rows.len()).map(|k| Symbol::new(format!("x{k}"))).collect();
        let mut eqs = vec![Equation::new(Expr::Sym(syms[0].clone()).powi(2), Expr::int(square))];
        for (k, (a, bs, c)) in rows.iter().enumerate() {
            let mut terms = vec![Expr::int(*a) * Expr::Sym(syms[k + 1].clone()), Expr::int(*c)];
            for j in 0..=k {
                terms.push(Expr::int(bs[j]) * Expr::Sym(syms[j].clone()));
            }
            eqs.push(Equation::new(Expr::add(terms), Expr::zero()));
        }
        let unknowns: BTreeSet<Symbol> = syms.iter().cloned().collect();
        let sol = solve_system(&eqs, &unknowns, RootPolicy::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for eq in &eqs {
            let r = residual_ok(eq, &sol.env).map_err(TestCaseError::fail)?;
            prop_assert!(r <= 1e-9, "residual {} in {}", r, eq);
            worst_random.set(worst_random.get().max(r));
        }
        Ok(())
    })?;
    let worst = worst.max(worst_random.get());
    check(worst <= 1e-9, format!("fixture + {n} random systems, worst relative residual {worst:.1e}"))
}

fn permutation(engine: &Engine) -> Outcome {
    let strategy = (
        prop::collection::vec(1i64..60, 2..6),
        Just(()).prop_perturb(|_, mut rng| rng.next_u64()),
        any::<bool>(),
    );
    let n = run_property(256, strategy, |(values, seed, product)| {
        let op = if product { "Multiple" } else { "Sum" };
        let params: Vec<String> = values.iter().enumerate().map(|(i, v)| format!("N{i}={v}")).collect();
        let params = params.join(" ");
        let mut order: Vec<usize> = (0..values.len()).collect();
        let mut state = seed;
        for i in (1..order.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let program = |idx: &[usize]| {
            let args: Vec<String> = idx.iter().map(|i| format!("N{i}")).collect();
            format!("{op} {} V0 Gougu V0 C1 V1 Get V1", args.join(" "))
        };
        let straight: Vec<usize> = (0..values.len()).collect();
        let a = engine.run(&program(&straight), &params).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = engine.run(&program(&order), &params).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a.answer.to_bits(), b.answer.to_bits());
        prop_assert_eq!(a.answer_expr, b.answer_expr);
        Ok(())
    })?;
    Ok(format!("{n} operand orders"))
}

fn monotone_pass_at_k() -> Outcome {
    let n = run_property(1000, prop::collection::vec(prop::collection::vec(any::<bool>(), 8), 0..40), |rows| {
        for k in 1..8 {
            prop_assert!(pass_at_k(&rows, k) <= pass_at_k(&rows, k + 1));
        }
        Ok(())
    })?;
    Ok(format!("{n} correctness matrices"))
}

fn fuzz_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::collection::vec(any::<u8>(), 0..256).prop_map(|b| String::from_utf8_lossy(&b).into_owned()),
        (
            prop::collection::vec(any::<u8>(), 0..96),
            prop::collection::vec(any::<u8>(), 0..48),
        )
            .prop_map(|(a, b)| {
                format!(
                    "\\boxed{{{}}} \\boxed{{N0={}}}",
                    String::from_utf8_lossy(&a),
                    String::from_utf8_lossy(&b)
                )
            }),
        "(\\\\boxed\\{|\\}|[A-Za-z_]{1,12}|[NVC][0-9]{1,3}|[=+*/^(). ,-]|[0-9.]{1,6}| ){0,40}",
    ]
}

fn fuzz(engine: &Engine) -> Outcome {
    let aborts = std::cell::Cell::new(0u32);
    let n = run_property(10_000, fuzz_strategy(), |s| {
        match catch_unwind(AssertUnwindSafe(|| engine.verify_response(&s, 1.0))) {
            Ok(v) => prop_assert!(v.reward <= 1 && (v.reward == 1) == (v.diagnostic == DiagnosticCode::Match)),
            Err(_) => {
                aborts.set(aborts.get() + 1);
                return Err(TestCaseError::fail(format!("panic on {s:?}")));
            }
        }
        Ok(())
    })?;
    check(aborts.get() == 0, format!("{n} random inputs, {} aborts", aborts.get()))
}

fn batch_items() -> Result<Vec<Value>, String> {
    let fixture = load_dataset(fixture_path()).map_err(|e| e.to_string())?;
    Ok((0..256)
        .map(|i| {
            let r = &fixture[i % fixture.len()];
            let (program, params) = (r.program.clone().unwrap_or_default(), r.params.clone().unwrap_or_default());
            match i % 6 {
                0 => json!({"id": i, "program": program, "params": params, "truth": r.answer}),
                1 => json!({"id": i, "program": program, "params": params, "truth": r.answer * 2.0 + 1.0}),
                2 => json!({"id": i, "response": format!("\\boxed{{{program}}}\n\\boxed{{{params}}}"), "truth": r.answer}),
                3 => json!({"id": i, "response": UNDEFINED_OPS_RESPONSE, "truth": r.answer}),
                4 => json!({"id": i, "program": "Gougu N0 V0 N1 Get V0", "params": "N0=5 N1=3", "truth": 1}),
                _ => json!({"id": format!("s{i}"), "response": "", "truth": r.answer}),
            }
        })
        .collect())
}

fn strip_elapsed(v: &Value) -> Value {
    let mut v = v.clone();
    if let Value::Object(m) = &mut v {
        m.remove("elapsed_ms");
    }
    v
}

fn batch_determinism() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().map_err(|e| e.to_string())?;
    let items = batch_items()?;
    rt.block_on(async {
        let app = router(&ServiceConfig::default());
        let call = |uri: &'static str, body: Value| {
            let app = app.clone();
            async move {
                let req = Request::post(uri)
                    .header("content-type", "application/json")
                    .body(Body::from(body.to_string()))
                    .unwrap();
                let resp = app.oneshot(req).await.unwrap();
                let bytes = resp.into_body().collect().await.unwrap().to_bytes();
                serde_json::from_slice::<Value>(&bytes).unwrap()
            }
        };
        let batch = call("/v1/verify_batch", Value::Array(items.clone())).await;
        let batch = batch.as_array().ok_or("batch reply is not an array")?.clone();
        let mut mismatches = 0;
        for (item, got) in items.iter().zip(&batch) {
            let want = call("/v1/verify", item.clone()).await;
            if strip_elapsed(&want) != strip_elapsed(got) {
                mismatches += 1;
            }
        }
        let rewarded = batch.iter().filter(|r| r["reward"] == 1).count();
        check(
            batch.len() == items.len() && mismatches == 0,
            format!("{} replies, {mismatches} mismatches, {rewarded} rewarded", batch.len()),
        )
    })
}

fn stratification(engine: &Engine) -> Outcome {
    let bucket = |text: &str| parse_program(text, engine.registry()).map(|p| DifficultyBucket::of(&p));
    let angle = bucket(ANGLE).map_err(|e| e.to_string())?;
    let example = bucket(EXAMPLE_ONE).map_err(|e| e.to_string())?;
    check(
        angle == DifficultyBucket::UpTo2 && example == DifficultyBucket::SixPlus,
        format!("angle -> {angle}, example 1 -> {example}"),
    )
}

fn main() -> ExitCode {
    let engine = Engine::bundled();
    let criteria: Vec<Criterion> = vec![
        ("hexagon shaded region 26.632 within 1e-3 in under 10 ms", Box::new(|| hexagon(&engine))),
        ("angle problem yields 51", Box::new(|| angle(&engine))),
        ("tolerance rejects 26.764 and accepts 26.632", Box::new(tolerance)),
        ("chord/tangent chain yields 46 with V0 = 91", Box::new(|| chord(&engine))),
        ("parallelogram area matches 15*sqrt(120) oracle", Box::new(|| parallelogram(&engine))),
        ("Solve/Set response rejected with UnknownOperator", Box::new(|| undefined_operators(&engine))),
        ("oracle-check passes the fixture in under 1 s", Box::new(oracle_check_cli)),
        ("property: parse/serialize round-trip", Box::new(round_trip)),
        ("property: solver residuals <= 1e-9", Box::new(|| residuals(&engine))),
        ("property: Sum/Multiple operand permutation invariance", Box::new(|| permutation(&engine))),
        ("property: Pass@k monotone in k", Box::new(monotone_pass_at_k)),
        ("property: verify_response total on random input", Box::new(|| fuzz(&engine))),
        ("property: 256-item batch equals sequential replies", Box::new(batch_determinism)),
        ("stratification: angle in bucket 2, example 1 in >=6", Box::new(|| stratification(&engine))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name} ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({detail})");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
