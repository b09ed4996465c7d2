use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use quizbn_cli::{ask, load_model, simulate, simulate_to, summary_table, validate, Cli, CliError, Command};
use quizbn_core::SessionStatus;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn sim_args(extra: &[&str]) -> quizbn_cli::SimulateArgs {
    let mut argv = vec!["quizbn", "simulate"];
    argv.extend_from_slice(extra);
    match Cli::try_parse_from(argv).unwrap().command {
        Command::Simulate(a) => a,
        other => panic!("parsed {other:?}"),
    }
}

#[test]
fn validate_accepts_every_shipped_questionnaire() {
    for name in ["net_a", "net_b", "net_b_uniform", "naive_bayes_health"] {
        let msg = validate(&fixture(&format!("questionnaires/{name}.json"))).unwrap();
        assert!(msg.starts_with("ok: "), "{msg}");
    }
}

#[test]
fn validate_reports_every_diagnostic() {
    let err = validate(&fixture("diagnostics/duplicate_id.json")).unwrap_err();
    let CliError::Document(d) = &err else { panic!("{err}") };
    assert!(d.iter().all(|x| x.code.as_str() == "duplicate_id"));
    assert!(err.to_string().contains("[duplicate_id]"));
    assert!(matches!(validate(&fixture("missing.json")), Err(CliError::Io { .. })));
}

#[test]
fn simulate_writes_a_deterministic_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let model = fixture("questionnaires/net_b.json");
    let args = sim_args(&[
        "--model", model.to_str().unwrap(), "--runs", "50", "--policies", "ig,random:3,fixed",
        "--seed", "11", "--out", out.to_str().unwrap(),
    ]);
    let mut stdout = Vec::new();
    let report = simulate_to(&args, &mut stdout).unwrap();
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, report.to_json());

    let sequential = simulate(&sim_args(&[
        "--model", model.to_str().unwrap(), "--runs", "50", "--policies", "ig,random:3,fixed",
        "--seed", "11", "--sequential",
    ]))
    .unwrap();
    assert_eq!(sequential.to_json(), written);

    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["rng"], "ChaCha8");
    assert_eq!(v["runs"], 50);
    assert_eq!(v["traces"].as_array().unwrap().len(), 50);
    let table = summary_table(&report);
    assert!(table.contains("information_gain") && table.contains("fixed_order"));
}

#[test]
fn simulate_generated_models() {
    let r = simulate(&sim_args(&["--generate", "--skills", "3", "--questions", "10", "--runs", "40", "--seed", "5"]))
        .unwrap();
    assert!(r.generator.is_some());
    assert_eq!(r.generator.as_ref().unwrap().skills, 3);
    assert_eq!(r.summaries.len(), 3);
}

#[test]
fn simulate_argument_errors() {
    assert!(Cli::try_parse_from(["quizbn", "simulate"]).is_err());
    assert!(Cli::try_parse_from(["quizbn", "simulate", "--model", "a.json", "--generate"]).is_err());
    assert!(Cli::try_parse_from(["quizbn", "simulate", "--model", "a.json", "--skills", "3"]).is_err());
    let bad = simulate(&sim_args(&["--generate", "--policies", "ig,bogus", "--runs", "2"]));
    assert!(matches!(bad, Err(CliError::Core(_))));
}

#[test]
fn ask_net_a_reprompts_then_stops_on_entropy() {
    let model = load_model(&fixture("questionnaires/net_a.json")).unwrap();
    let mut out = Vec::new();
    let s = ask(&model, "maybe\n7\n0\n".as_bytes(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(s.status(), SessionStatus::StoppedEntropy);
    assert_eq!(s.transcript()[0].question, "Q1");
    assert_eq!(text.matches("Please type a number from 0 to 1.").count(), 2);
    assert!(text.contains("P(S): yes 0.500, no 0.500"));
    assert!(text.contains("Grade: 0.9000"));
}

#[test]
fn ask_quits_on_q_or_end_of_input() {
    let model = load_model(&fixture("questionnaires/net_b.json")).unwrap();
    for input in ["q\n", ""] {
        let mut out = Vec::new();
        let s = ask(&model, input.as_bytes(), &mut out).unwrap();
        assert!(s.is_active());
        assert!(String::from_utf8(out).unwrap().contains("Stopped early after 0 answer(s)."));
    }
}

#[test]
fn binary_runs_validate_and_ask() {
    let exe = env!("CARGO_BIN_EXE_quizbn");
    let ok = Process::new(exe).args(["validate", "--model"]).arg(fixture("questionnaires/net_a.json")).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("ok: NET-A"));

    let bad = Process::new(exe).args(["validate", "--model"]).arg(fixture("diagnostics/syntax.json")).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("[syntax]"));
}
