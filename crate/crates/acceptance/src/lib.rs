//! Acceptance checks. Each returns a one-line summary on success and the
//! first violated expectation on failure.

use std::fmt::Display;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use http_body_util::BodyExt;
use quizbn_core::adaptive::{
    conditional_entropy, entropy, grade, information_gains, pick_question, posterior_entropy, skill_posterior,
};
use quizbn_core::bn::{enumerate_joint, posterior};
use quizbn_core::elicit::{dg_to_probabilities, probabilities_to_dg, DgParams};
use quizbn_core::fixtures::random::{random_evidence, random_network, random_questionnaire, NetworkShape};
use quizbn_core::model_io::{document_to_model, parse_questionnaire, serialize_questionnaire, DiagnosticCode};
use quizbn_core::simulate::{run_batch, run_generated_batch, GeneratorConfig, PolicySpec};
use quizbn_core::{Error, Evidence, Execution, QuestionnaireModel, Session, SessionStatus};
use quizbn_service::{router, AnswerRequest, NextQuestionResponse, Service};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub name: &'static str,
    pub check: fn() -> Outcome,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { name: "oracle_equivalence", check: oracle_equivalence },
    Criterion { name: "net_a_end_to_end", check: net_a_end_to_end },
    Criterion { name: "information_gain_non_negative", check: information_gain_non_negative },
    Criterion { name: "delta_gamma_round_trip", check: delta_gamma_round_trip },
    Criterion { name: "simulation_superiority", check: simulation_superiority },
    Criterion { name: "determinism", check: determinism },
    Criterion { name: "format_round_trip", check: format_round_trip },
    Criterion { name: "service_contract", check: service_contract },
];

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        {
            let ok: bool = $cond;
            if !ok {
                return Err(format!($($fmt)+));
            }
        }
    };
}

fn s(e: impl Display) -> String {
    e.to_string()
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture(rel: &str) -> Result<String, String> {
    let p = fixtures_dir().join(rel);
    std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
}

/// Every questionnaire shipped under `fixtures/questionnaires`, by file name.
fn shipped_questionnaires() -> Result<Vec<(String, String)>, String> {
    let dir = fixtures_dir().join("questionnaires");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .map_err(s)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().map(|n| fixture(&format!("questionnaires/{n}")).map(|t| (n, t))).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let (mut compared, mut rejected, mut worst) = (0usize, 0usize, 0f64);
    for i in 0..300 {
        let n = rng.random_range(1..=12);
        let shape = NetworkShape {
            variables: n,
            max_cardinality: 2,
            max_parents: 3,
            zero_probability: if i % 4 == 0 { 0.2 } else { 0.0 },
        };
        let net = random_network(&mut rng, shape);
        let mut ids: Vec<String> = net.variables().iter().map(|v| v.id().to_string()).collect();
        ids.shuffle(&mut rng);
        let k = rng.random_range(1..=ids.len().min(3));
        let targets = &ids[..k];
        let e = random_evidence(&mut rng, &net, n - k, targets);
        match (posterior(&net, targets, &e), enumerate_joint(&net, targets, &e)) {
            (Ok(ve), Ok(oracle)) => {
                ensure!(ve.scope() == oracle.scope(), "network {i}: scopes differ");
                for (a, b) in ve.table().iter().zip(oracle.table()) {
                    worst = worst.max((a - b).abs());
                }
                compared += 1;
            }
            (Err(Error::InconsistentEvidence), Err(Error::InconsistentEvidence)) => rejected += 1,
            (a, b) => return Err(format!("network {i}: elimination {a:?} vs enumeration {b:?}")),
        }
    }
    ensure!(worst <= 1e-9, "max entrywise difference {worst:e} > 1e-9");
    ensure!(compared >= 200, "only {compared} consistent networks compared");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "{compared} random networks agree with enumeration (max diff {worst:.1e}); {rejected} zero-probability evidence sets rejected by both"
    ))
}

fn net_a_end_to_end() -> Outcome {
    let model = parse_questionnaire(&fixture("questionnaires/net_a.json")?).map_err(s)?;
    let net = model.network();
    let e0 = Evidence::new();

    let h0 = posterior_entropy(&model, &e0).map_err(s)?;
    let h0_oracle = entropy(&enumerate_joint(net, &["S"], &e0).map_err(s)?).map_err(s)?;
    ensure!((h0 - 1.0).abs() < 1e-12 && (h0_oracle - 1.0).abs() < 1e-12, "H(S) = {h0}, oracle {h0_oracle}");

    let gains = information_gains(&model, &e0, &["Q1", "Q2"], Execution::Sequential).map_err(s)?;
    for (q, g, want) in [("Q1", gains[0], 0.5310), ("Q2", gains[1], 0.1187)] {
        ensure!((g - want).abs() <= 1e-4, "IG({q}) = {g}, expected {want}");
        let oracle = oracle_gain(&model, model.skills(), q, &e0)?;
        ensure!((g - oracle).abs() < 1e-12, "IG({q}) = {g}, oracle {oracle}");
    }

    let mut session = Session::start(&model).map_err(s)?;
    let pick = pick_question(&model, &session).map_err(s)?;
    ensure!(pick.as_deref() == Some("Q1"), "picked {pick:?}");
    session.answer(&model, "Q1", 0).map_err(s)?;
    let h1 = posterior_entropy(&model, session.evidence()).map_err(s)?;
    ensure!((h1 - 0.4690).abs() <= 1e-4 && h1 <= 0.5, "H(S | Q1=yes) = {h1}");
    ensure!(session.status() == SessionStatus::StoppedEntropy, "status {:?}", session.status());
    let g = grade(&model, session.evidence()).map_err(s)?;
    let oracle = enumerate_joint(net, &["S"], session.evidence()).map_err(s)?.table()[0];
    ensure!((g - 0.9).abs() <= 1e-9 && (oracle - 0.9).abs() <= 1e-12, "grade {g}, oracle {oracle}");
    Ok(format!("H = 1.0, IG = ({:.4}, {:.4}), pick Q1, H after yes = {h1:.4}, stopped, grade {g}", gains[0], gains[1]))
}

/// `H(S | e) - sum_q P(q | e) H(S | q, e)` from brute-force enumeration.
fn oracle_gain(model: &QuestionnaireModel, skills: &[String], q: &str, e: &Evidence) -> Result<f64, String> {
    let net = model.network();
    let h = entropy(&enumerate_joint(net, skills, e).map_err(s)?).map_err(s)?;
    let pq = enumerate_joint(net, &[q], e).map_err(s)?;
    let mut cond = 0.0;
    for (state, &p) in pq.table().iter().enumerate() {
        if p > 0.0 {
            let eq = e.clone().with(q, state).map_err(s)?;
            cond += p * entropy(&enumerate_joint(net, skills, &eq).map_err(s)?).map_err(s)?;
        }
    }
    Ok(h - cond)
}

fn information_gain_non_negative() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x16A1);
    let (mut pairs, mut min_raw, mut max_irrelevant, mut worst_oracle) = (0usize, f64::INFINITY, 0f64, 0f64);
    for i in 0..600 {
        let skills = rng.random_range(1..=3);
        let questions = rng.random_range(1..=5);
        let model = random_questionnaire(&mut rng, skills, questions, 3, true);
        let mut exclude = model.skills().to_vec();
        exclude.push("QX".into());
        let e = random_evidence(&mut rng, model.network(), questions, &exclude);
        let open: Vec<String> = model.pool().iter().map(|q| q.id.clone()).filter(|q| !e.contains(q)).collect();
        let gains = information_gains(&model, &e, &open, Execution::Sequential).map_err(s)?;
        let h = posterior_entropy(&model, &e).map_err(s)?;
        for (q, g) in open.iter().zip(&gains) {
            let raw = h - conditional_entropy(&model, q, &e).map_err(s)?;
            min_raw = min_raw.min(raw);
            ensure!(raw >= -1e-9, "model {i}: raw gain of {q} is {raw}");
            ensure!(*g >= 0.0, "model {i}: clamped gain of {q} is {g}");
            if q == "QX" {
                max_irrelevant = max_irrelevant.max(*g);
                ensure!(*g <= 1e-9, "model {i}: irrelevant question gains {g}");
            }
            let oracle = oracle_gain(&model, model.skills(), q, &e)?;
            worst_oracle = worst_oracle.max((raw - oracle).abs());
            ensure!((raw - oracle).abs() <= 1e-9, "model {i}: gain of {q} is {raw}, oracle {oracle}");
        }
        pairs += 1;
    }
    ensure!(pairs >= 500, "only {pairs} model/evidence pairs");
    Ok(format!(
        "{pairs} model/evidence pairs: min raw gain {min_raw:.1e}, max irrelevant gain {max_irrelevant:.1e}, max |gain - oracle| {worst_oracle:.1e}"
    ))
}

fn delta_gamma_round_trip() -> Outcome {
    const STEPS: u32 = 200;
    let (mut feasible, mut infeasible, mut worst) = (0usize, 0usize, 0f64);
    for i in 0..=STEPS {
        for j in 0..=STEPS {
            let dg = DgParams { delta: f64::from(i) / f64::from(STEPS), gamma: f64::from(j) / f64::from(STEPS) };
            // delta/2 <= gamma <= 1 - delta/2, decided exactly in integers.
            let inside = i <= 2 * j && 2 * j + i <= 2 * STEPS;
            match dg_to_probabilities(dg) {
                Ok((p, q)) => {
                    ensure!(inside, "{dg:?} accepted outside the feasible region");
                    let back = probabilities_to_dg(p, q).map_err(s)?;
                    worst = worst.max((back.delta - dg.delta).abs()).max((back.gamma - dg.gamma).abs());
                    feasible += 1;
                }
                Err(Error::InfeasibleParameters(_)) => {
                    ensure!(!inside, "{dg:?} rejected inside the feasible region");
                    infeasible += 1;
                }
                Err(e) => return Err(format!("{dg:?}: unexpected error {e}")),
            }
        }
    }
    ensure!(worst <= 1e-12, "round-trip error {worst:e}");
    Ok(format!("{feasible} feasible points round-trip (max error {worst:.1e}); {infeasible} infeasible points rejected"))
}

fn simulation_superiority() -> Outcome {
    let start = Instant::now();
    let config = GeneratorConfig::default();
    let policies = [PolicySpec::InformationGain, PolicySpec::Random { seed: 17 }];
    let report = run_generated_batch(&config, 1000, &policies, 2024, Execution::default()).map_err(s)?;
    let c = report.comparison("random").ok_or("no comparison against random")?;
    let ig = report.summary("information_gain").ok_or("no information_gain summary")?;
    let rnd = report.summary("random").ok_or("no random summary")?;
    ensure!(c.pairs >= 1000, "{} pairs", c.pairs);
    ensure!(
        c.mean_difference > 0.0 && c.baseline_fewer_at_95,
        "random - information_gain = {} questions, p = {}",
        c.mean_difference,
        c.p_value
    );
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    Ok(format!(
        "{} paired runs: information_gain {:.3} vs random {:.3} questions, one-sided paired t = {:.2}, p = {:.1e}",
        c.pairs,
        ig.mean_questions,
        rnd.mean_questions,
        c.t_statistic.unwrap_or(f64::INFINITY),
        c.p_value
    ))
}

fn exec_modes() -> Vec<Execution> {
    let mut modes = vec![Execution::Sequential];
    if Execution::default() != Execution::Sequential {
        modes.push(Execution::default());
    }
    modes
}

/// Answers the offered question with `pick(step)` (clamped to the option
/// count) until the session stops. Returns the responses without the
/// session id.
fn drive_service(svc: &Service, survey: &str, pick: &dyn Fn(usize) -> usize) -> Result<(String, Vec<Value>), String> {
    let mut r = svc.start_session(survey).map_err(s)?;
    let sid = match &r {
        NextQuestionResponse::Question { session_id, .. } | NextQuestionResponse::Terminal { session_id, .. } => {
            session_id.clone()
        }
    };
    let mut seen = Vec::new();
    let mut out = Vec::new();
    loop {
        let mut v = serde_json::to_value(&r).map_err(s)?;
        v.as_object_mut().expect("responses are objects").remove("session_id");
        out.push(v);
        let NextQuestionResponse::Question { question, .. } = &r else { break };
        ensure!(!seen.contains(&question.id), "question {} offered twice", question.id);
        seen.push(question.id.clone());
        let answer = pick(seen.len() - 1).min(question.options.len() - 1);
        r = svc.submit_answer(&sid, &AnswerRequest { question: question.id.clone(), answer }).map_err(s)?;
    }
    Ok((sid, out))
}

fn determinism() -> Outcome {
    let net_b = parse_questionnaire(&fixture("questionnaires/net_b.json")?).map_err(s)?;
    let policies = PolicySpec::parse_list("ig,random:5,fixed").map_err(s)?;
    let mut reports = Vec::new();
    for exec in exec_modes() {
        for _ in 0..2 {
            reports.push(run_batch(&net_b, 300, &policies, 99, exec).map_err(s)?.to_json());
            reports.push(
                run_generated_batch(&GeneratorConfig::default(), 200, &policies, 99, exec).map_err(s)?.to_json(),
            );
        }
    }
    for pair in reports.chunks(2).collect::<Vec<_>>().windows(2) {
        ensure!(pair[0] == pair[1], "batch reports differ between repetitions or execution modes");
    }

    let mut sessions = 0;
    let patterns: [&dyn Fn(usize) -> usize; 3] = [&|_| 0, &|_| 1, &|i| i % 3];
    for (name, text) in shipped_questionnaires()? {
        for pick in patterns {
            let a = Service::in_memory();
            let b = Service::in_memory();
            let ida = a.create_survey(&text).map_err(s)?.id;
            let idb = b.create_survey(&text).map_err(s)?.id;
            a.publish_survey(&ida).map_err(s)?;
            b.publish_survey(&idb).map_err(s)?;
            let (sa, ra) = drive_service(&a, &ida, pick)?;
            let (sb, rb) = drive_service(&b, &idb, pick)?;
            ensure!(ra == rb, "{name}: replay on a fresh instance gave different responses");
            let rec_a = a.session_record(&sa).map_err(s)?;
            let rec_b = b.session_record(&sb).map_err(s)?;
            ensure!(rec_a.transcript == rec_b.transcript, "{name}: transcripts differ");
            ensure!(rec_a.grade == rec_b.grade, "{name}: grades differ");

            let stored = document_to_model(&b.get_survey(&idb).map_err(s)?.document).map_err(s)?;
            let replayed = rec_a.verify(&stored).map_err(s)?;
            ensure!(replayed.transcript() == rec_a.transcript.as_slice(), "{name}: stored record replays differently");
            sessions += 1;
        }
    }
    Ok(format!(
        "{} batch reports byte-identical across repetitions and {} execution mode(s); {sessions} recorded service sessions replay identically",
        reports.len(),
        exec_modes().len()
    ))
}

fn posteriors_match(a: &QuestionnaireModel, b: &QuestionnaireModel, e: &Evidence) -> Result<f64, String> {
    match (skill_posterior(a, e), skill_posterior(b, e)) {
        (Ok(x), Ok(y)) => {
            ensure!(x.scope() == y.scope(), "posterior scopes differ");
            Ok(x.table().iter().zip(y.table()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
        }
        (Err(Error::InconsistentEvidence), Err(Error::InconsistentEvidence)) => Ok(0.0),
        (x, y) => Err(format!("posterior {x:?} vs {y:?}")),
    }
}

fn format_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0);
    let mut models: Vec<(String, QuestionnaireModel)> = Vec::new();
    let shipped = shipped_questionnaires()?;
    for (name, text) in &shipped {
        let m = parse_questionnaire(text).map_err(|d| format!("{name} does not parse:\n{d}"))?;
        models.push((name.clone(), m));
    }
    for i in 0..100 {
        let skills = rng.random_range(1..=3);
        let questions = rng.random_range(1..=6);
        models.push((format!("random #{i}"), random_questionnaire(&mut rng, skills, questions, 3, i % 2 == 0)));
    }
    let (mut checks, mut worst) = (0usize, 0f64);
    for (name, m) in &models {
        let text = serialize_questionnaire(m);
        let back = parse_questionnaire(&text).map_err(|d| format!("{name}: serialized form does not parse:\n{d}"))?;
        ensure!(serialize_questionnaire(&back) == text, "{name}: serialization is not stable");
        for _ in 0..20 {
            let e = random_evidence(&mut rng, m.network(), m.pool().len(), m.skills());
            let d = posteriors_match(m, &back, &e)?;
            worst = worst.max(d);
            ensure!(d <= 1e-12, "{name}: posterior differs by {d:e}");
            checks += 1;
        }
    }
    let mut fired = 0;
    for code in DiagnosticCode::ALL {
        let file = format!("diagnostics/{}.json", code.as_str());
        match parse_questionnaire(&fixture(&file)?) {
            Ok(_) => return Err(format!("{file} parsed without diagnostics")),
            Err(d) => ensure!(d.has(code), "{file} did not raise {code}: {d}"),
        }
        fired += 1;
    }
    Ok(format!(
        "{} shipped fixtures parse; {} models round-trip with {checks} posteriors within {worst:.1e}; {fired}/{} diagnostic codes fire",
        shipped.len(),
        models.len(),
        DiagnosticCode::ALL.len()
    ))
}

struct Http {
    rt: tokio::runtime::Runtime,
    app: Router,
}

impl Http {
    fn new() -> Result<Self, String> {
        let rt = tokio::runtime::Builder::new_current_thread().build().map_err(s)?;
        Ok(Self { rt, app: router(Arc::new(Service::in_memory())) })
    }

    fn call(&self, method: Method, uri: &str, body: Option<String>) -> Result<(u16, Value), String> {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json")
            .body(body.map(Body::from).unwrap_or_else(Body::empty))
            .map_err(s)?;
        let app = self.app.clone();
        self.rt.block_on(async move {
            let res = app.oneshot(req).await.map_err(s)?;
            let status = res.status().as_u16();
            let bytes = res.into_body().collect().await.map_err(s)?.to_bytes();
            let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).map_err(s)? };
            Ok((status, v))
        })
    }

    fn expect(&self, method: Method, uri: &str, body: Option<String>, status: u16) -> Result<Value, String> {
        let (got, v) = self.call(method.clone(), uri, body)?;
        ensure!(got == status, "{method} {uri}: expected {status}, got {got} {v}");
        Ok(v)
    }

    fn answer(&self, sid: &str, q: &str, a: usize, status: u16) -> Result<Value, String> {
        let body = json!({ "question": q, "answer": a }).to_string();
        self.expect(Method::POST, &format!("/sessions/{sid}/answers"), Some(body), status)
    }
}

fn service_contract() -> Outcome {
    let net_a = fixture("questionnaires/net_a.json")?;
    let http = Http::new()?;
    let mut checks = 0;
    let mut check = |ok: bool, what: &str| -> Result<(), String> {
        checks += 1;
        if ok { Ok(()) } else { Err(what.to_string()) }
    };

    let created = http.expect(Method::POST, "/surveys", Some(net_a.clone()), 201)?;
    let id = created["id"].as_str().ok_or("no survey id")?.to_string();
    let bad = http.expect(Method::POST, "/surveys", Some(fixture("diagnostics/parameterization.json")?), 422)?;
    check(bad["diagnostics"][0]["code"] == "parameterization", "double parameterization diagnostic missing")?;
    http.expect(Method::GET, "/surveys/missing", None, 404)?;
    http.expect(Method::POST, &format!("/surveys/{id}/sessions"), None, 409)?;
    http.expect(Method::POST, &format!("/surveys/{id}/publish"), None, 200)?;
    http.expect(Method::PUT, &format!("/surveys/{id}"), Some(net_a.clone()), 409)?;
    http.expect(Method::POST, "/surveys/missing/sessions", None, 404)?;

    let start = http.expect(Method::POST, &format!("/surveys/{id}/sessions"), None, 201)?;
    check(start["question"]["id"] == "Q1", "first question is not Q1")?;
    let sid = start["session_id"].as_str().ok_or("no session id")?.to_string();
    let ex = http.expect(Method::GET, &format!("/sessions/{sid}/explain"), None, 200)?;
    let gain = |i: usize| ex["per_candidate"][i]["gain"].as_f64().unwrap_or(f64::NAN);
    check(
        ex["per_candidate"][0]["question"] == "Q1"
            && ex["per_candidate"][1]["question"] == "Q2"
            && (gain(0) - 0.5310).abs() <= 1e-4
            && (gain(1) - 0.1187).abs() <= 1e-4,
        "explain gains are not [(Q1, 0.5310), (Q2, 0.1187)]",
    )?;
    http.expect(Method::GET, &format!("/sessions/{sid}/result"), None, 409)?;
    http.answer(&sid, "Q2", 0, 409)?;
    http.answer(&sid, "Q1", 9, 422)?;

    let done = http.answer(&sid, "Q1", 0, 200)?;
    let risk_sum: f64 = done["risks"].as_object().map_or(0.0, |r| r.values().filter_map(Value::as_f64).sum());
    check(
        done["kind"] == "terminal"
            && done["stop_reason"] == "stopped_entropy"
            && (done["grade"].as_f64().unwrap_or(f64::NAN) - 0.9).abs() <= 1e-9
            && (risk_sum - 1.0).abs() <= 1e-12,
        "Q1=yes does not end with grade 0.9, stopped_entropy and risks summing to one",
    )?;
    let again = http.answer(&sid, "Q1", 0, 200)?;
    check(again == done, "resubmission changed the response")?;
    for (q, a) in [("Q2", 0), ("Q2", 1), ("Q1", 1)] {
        http.answer(&sid, q, a, 409)?;
    }
    let next = http.expect(Method::GET, &format!("/sessions/{sid}/next"), None, 200)?;
    check(next == done, "terminal state is not absorbing")?;
    let ex = http.expect(Method::GET, &format!("/sessions/{sid}/explain"), None, 200)?;
    check(ex["per_candidate"] == json!([]), "terminal explanation has candidates")?;
    let result = http.expect(Method::GET, &format!("/sessions/{sid}/result"), None, 200)?;
    check((result["grade"].as_f64().unwrap_or(f64::NAN) - 0.9).abs() <= 1e-9, "result grade is not 0.9")?;
    http.expect(Method::DELETE, &format!("/surveys/{id}"), None, 409)?;
    http.expect(Method::GET, "/sessions/missing/explain", None, 404)?;
    http.expect(Method::GET, "/sessions/missing/next", None, 404)?;

    let mut lax: Value = serde_json::from_str(&net_a).map_err(s)?;
    lax["stop_threshold"] = json!(1.0);
    let lax_id = http.expect(Method::POST, "/surveys", Some(lax.to_string()), 201)?["id"]
        .as_str()
        .ok_or("no survey id")?
        .to_string();
    http.expect(Method::POST, &format!("/surveys/{lax_id}/publish"), None, 200)?;
    let immediate = http.expect(Method::POST, &format!("/surveys/{lax_id}/sessions"), None, 201)?;
    check(
        immediate["kind"] == "terminal" && (immediate["grade"].as_f64().unwrap_or(f64::NAN) - 0.5).abs() <= 1e-12,
        "threshold at the prior entropy does not stop before the first question",
    )?;
    http.expect(Method::DELETE, "/surveys/missing", None, 404)?;
    let spare = http.expect(Method::POST, "/surveys", Some(net_a), 201)?["id"].as_str().ok_or("no id")?.to_string();
    http.expect(Method::DELETE, &format!("/surveys/{spare}"), None, 204)?;
    Ok(format!("{checks} response-body checks and every 201/404/409/422 example pass against the in-memory store"))
}
