use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use quizbn_service::{router, Service};
use serde_json::{json, Value};
use tower::ServiceExt;

const NET_A: &str = include_str!("../../core/fixtures/questionnaires/net_a.json");
const NET_B: &str = include_str!("../../core/fixtures/questionnaires/net_b.json");
const HEALTH: &str = include_str!("../../core/fixtures/questionnaires/naive_bayes_health.json");
const DOUBLE: &str = include_str!("../../core/fixtures/diagnostics/parameterization.json");

struct Reply {
    status: StatusCode,
    location: Option<String>,
    body: Value,
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> Reply {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let location = res.headers().get(header::LOCATION).map(|v| v.to_str().unwrap().to_string());
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    Reply { status, location, body }
}

fn app() -> Router {
    router(Arc::new(Service::in_memory()))
}

async fn published(app: &Router, doc: &str) -> String {
    let r = call(app, Method::POST, "/surveys", Some(doc.to_string())).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let id = r.body["id"].as_str().unwrap().to_string();
    let p = call(app, Method::POST, &format!("/surveys/{id}/publish"), None).await;
    assert_eq!(p.status, StatusCode::OK);
    id
}

async fn answer(app: &Router, sid: &str, q: &str, a: usize) -> Reply {
    let body = json!({ "question": q, "answer": a }).to_string();
    call(app, Method::POST, &format!("/sessions/{sid}/answers"), Some(body)).await
}

#[tokio::test]
async fn net_a_session_end_to_end() {
    let app = app();
    let created = call(&app, Method::POST, "/surveys", Some(NET_A.to_string())).await;
    assert_eq!(created.status, StatusCode::CREATED);
    let id = created.body["id"].as_str().unwrap().to_string();
    assert_eq!(created.location.as_deref(), Some(format!("/surveys/{id}").as_str()));
    assert_eq!(created.body["status"], "draft");

    let early = call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
    assert_eq!(early.status, StatusCode::CONFLICT);

    for _ in 0..2 {
        let p = call(&app, Method::POST, &format!("/surveys/{id}/publish"), None).await;
        assert_eq!(p.status, StatusCode::OK);
        assert_eq!(p.body["status"], "published");
    }

    let start = call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
    assert_eq!(start.status, StatusCode::CREATED);
    assert_eq!(start.body["kind"], "question");
    assert_eq!(start.body["question"]["id"], "Q1");
    assert_eq!(start.body["question"]["options"], json!(["Yes", "No"]));
    assert_eq!(start.body["explain_panel"], true);
    let sid = start.body["session_id"].as_str().unwrap().to_string();

    let ex = call(&app, Method::GET, &format!("/sessions/{sid}/explain"), None).await;
    assert_eq!(ex.status, StatusCode::OK);
    let cands = ex.body["per_candidate"].as_array().unwrap();
    assert_eq!(cands[0]["question"], "Q1");
    assert!((cands[0]["gain"].as_f64().unwrap() - 0.5310).abs() < 1e-4);
    assert_eq!(cands[1]["question"], "Q2");
    assert!((cands[1]["gain"].as_f64().unwrap() - 0.1187).abs() < 1e-4);
    assert!((ex.body["joint_entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let active = call(&app, Method::GET, &format!("/sessions/{sid}/result"), None).await;
    assert_eq!(active.status, StatusCode::CONFLICT);

    let wrong = answer(&app, &sid, "Q2", 0).await;
    assert_eq!(wrong.status, StatusCode::CONFLICT);
    let range = answer(&app, &sid, "Q1", 2).await;
    assert_eq!(range.status, StatusCode::UNPROCESSABLE_ENTITY);

    let done = answer(&app, &sid, "Q1", 0).await;
    assert_eq!(done.status, StatusCode::OK);
    assert_eq!(done.body["kind"], "terminal");
    assert_eq!(done.body["stop_reason"], "stopped_entropy");
    assert!((done.body["grade"].as_f64().unwrap() - 0.9).abs() < 1e-9);
    assert!((done.body["risks"]["mastered"].as_f64().unwrap() - 0.9).abs() < 1e-9);

    let again = answer(&app, &sid, "Q1", 0).await;
    assert_eq!(again.status, StatusCode::OK);
    assert_eq!(again.body, done.body);

    for (q, a) in [("Q2", 0), ("Q1", 1), ("Q2", 1)] {
        assert_eq!(answer(&app, &sid, q, a).await.status, StatusCode::CONFLICT);
    }
    let next = call(&app, Method::GET, &format!("/sessions/{sid}/next"), None).await;
    assert_eq!(next.body, done.body);

    let ex = call(&app, Method::GET, &format!("/sessions/{sid}/explain"), None).await;
    assert_eq!(ex.body["per_candidate"], json!([]));

    let res = call(&app, Method::GET, &format!("/sessions/{sid}/result"), None).await;
    assert_eq!(res.status, StatusCode::OK);
    assert_eq!(res.body["status"], "stopped_entropy");
    assert_eq!(res.body["survey_id"], id.as_str());
    assert_eq!(res.body["transcript"].as_array().unwrap().len(), 1);

    let list = call(&app, Method::GET, "/surveys", None).await;
    assert_eq!(list.body[0]["sessions"], 1);
    assert_eq!(list.body[0]["title"], "NET-A");
}

#[tokio::test]
async fn unknown_resources_are_404() {
    let app = app();
    for (m, uri) in [
        (Method::GET, "/surveys/nope"),
        (Method::PUT, "/surveys/nope"),
        (Method::DELETE, "/surveys/nope"),
        (Method::POST, "/surveys/nope/publish"),
        (Method::POST, "/surveys/nope/sessions"),
        (Method::GET, "/sessions/nope/next"),
        (Method::GET, "/sessions/nope/explain"),
        (Method::GET, "/sessions/nope/result"),
    ] {
        let body = (m == Method::PUT).then(|| NET_A.to_string());
        let r = call(&app, m, uri, body).await;
        assert_eq!(r.status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(r.body["error"], "not_found");
    }
    assert_eq!(answer(&app, "nope", "Q1", 0).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn invalid_documents_are_422_with_diagnostics() {
    let app = app();
    let r = call(&app, Method::POST, "/surveys", Some(DOUBLE.to_string())).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.body["error"], "validation_failed");
    let d = &r.body["diagnostics"][0];
    assert_eq!(d["code"], "parameterization");
    assert_eq!(d["path"], "questions[0]");

    let r = call(&app, Method::POST, "/surveys", Some("{ not json".into())).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.body["diagnostics"][0]["code"], "syntax");
    assert_eq!(r.body["diagnostics"][0]["line"], 1);

    let list = call(&app, Method::GET, "/surveys", None).await;
    assert_eq!(list.body, json!([]));
}

#[tokio::test]
async fn survey_lifecycle_guards() {
    let app = app();
    let r = call(&app, Method::POST, "/surveys", Some(NET_A.to_string())).await;
    let id = r.body["id"].as_str().unwrap().to_string();

    let put = call(&app, Method::PUT, &format!("/surveys/{id}"), Some(NET_B.to_string())).await;
    assert_eq!(put.status, StatusCode::OK);
    assert_eq!(put.body["document"]["metadata"]["title"], "NET-B");
    let bad = call(&app, Method::PUT, &format!("/surveys/{id}"), Some(DOUBLE.to_string())).await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);
    let got = call(&app, Method::GET, &format!("/surveys/{id}"), None).await;
    assert_eq!(got.body, put.body);

    call(&app, Method::POST, &format!("/surveys/{id}/publish"), None).await;
    let frozen = call(&app, Method::PUT, &format!("/surveys/{id}"), Some(NET_A.to_string())).await;
    assert_eq!(frozen.status, StatusCode::CONFLICT);

    call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
    let del = call(&app, Method::DELETE, &format!("/surveys/{id}"), None).await;
    assert_eq!(del.status, StatusCode::CONFLICT);

    let other = call(&app, Method::POST, "/surveys", Some(NET_A.to_string())).await;
    let oid = other.body["id"].as_str().unwrap();
    let del = call(&app, Method::DELETE, &format!("/surveys/{oid}"), None).await;
    assert_eq!(del.status, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, Method::GET, &format!("/surveys/{oid}"), None).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn impossible_answers_are_422_and_leave_the_session_unchanged() {
    let doc = json!({
        "format_version": 1,
        "skills": [{ "id": "S", "states": ["yes", "no"], "cpt": [[0.5, 0.5]] }],
        "questions": [{
            "id": "QZ", "text": "Always yes", "states": ["yes", "no"],
            "parents": ["S"], "cpt": [[1.0, 0.0], [1.0, 0.0]]
        }],
        "evaluation": [1.0, 0.0],
        "stop_threshold": 0.0
    });
    let app = app();
    let id = published(&app, &doc.to_string()).await;
    let start = call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
    let sid = start.body["session_id"].as_str().unwrap();
    let r = answer(&app, sid, "QZ", 1).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    let next = call(&app, Method::GET, &format!("/sessions/{sid}/next"), None).await;
    assert_eq!(next.body, start.body);
    let ok = answer(&app, sid, "QZ", 0).await;
    assert_eq!(ok.body["stop_reason"], "stopped_pool_exhausted");

    let malformed = call(&app, Method::POST, &format!("/sessions/{sid}/answers"), Some("{\"q\":1}".into())).await;
    assert_eq!(malformed.status, StatusCode::UNPROCESSABLE_ENTITY);
}

/// Drives a session by always answering state `pick(step)` and returns every
/// response with the session id removed.
async fn drive(app: &Router, survey: &str, pick: impl Fn(usize) -> usize) -> Vec<Value> {
    let mut r = call(app, Method::POST, &format!("/surveys/{survey}/sessions"), None).await.body;
    let sid = r["session_id"].as_str().unwrap().to_string();
    let mut out = Vec::new();
    let mut step = 0;
    while r["kind"] == "question" {
        let q = r["question"]["id"].as_str().unwrap().to_string();
        r.as_object_mut().unwrap().remove("session_id");
        out.push(r);
        r = answer(app, &sid, &q, pick(step)).await.body;
        step += 1;
    }
    r.as_object_mut().unwrap().remove("session_id");
    out.push(r);
    out
}

#[tokio::test]
async fn replaying_answers_on_a_fresh_instance_reproduces_every_response() {
    for doc in [NET_A, NET_B, HEALTH] {
        for pattern in 0..3usize {
            let pick = move |i: usize| if pattern == 2 { i % 2 } else { pattern };
            let a = app();
            let b = app();
            let sa = published(&a, doc).await;
            let sb = published(&b, doc).await;
            let ra = drive(&a, &sa, pick).await;
            let rb = drive(&b, &sb, pick).await;
            assert_eq!(ra, rb);
            assert_eq!(ra.last().unwrap()["kind"], "terminal");
        }
    }
}

#[tokio::test]
async fn persistent_store_restores_surveys_and_sessions() {
    let dir = tempfile::tempdir().unwrap();
    let (sid, first, done_body);
    {
        let app = router(Arc::new(Service::persistent(dir.path()).unwrap()));
        let id = published(&app, NET_B).await;
        let start = call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
        sid = start.body["session_id"].as_str().unwrap().to_string();
        first = start.body["question"]["id"].as_str().unwrap().to_string();
        done_body = answer(&app, &sid, &first, 0).await.body;
        let open = call(&app, Method::POST, &format!("/surveys/{id}/sessions"), None).await;
        assert_eq!(open.status, StatusCode::CREATED);
    }
    let app = router(Arc::new(Service::persistent(dir.path()).unwrap()));
    let list = call(&app, Method::GET, "/surveys", None).await;
    assert_eq!(list.body.as_array().unwrap().len(), 1);
    assert_eq!(list.body[0]["status"], "published");
    assert_eq!(list.body[0]["sessions"], 2);
    let next = call(&app, Method::GET, &format!("/sessions/{sid}/next"), None).await;
    assert_eq!(next.body, done_body);
    let again = answer(&app, &sid, &first, 0).await;
    assert_eq!(again.body, done_body);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions_are_independent() {
    let app = app();
    let id = published(&app, HEALTH).await;
    let reference = drive(&app, &id, |_| 0).await;
    let mut tasks = Vec::new();
    for _ in 0..16 {
        let app = app.clone();
        let id = id.clone();
        tasks.push(tokio::spawn(async move { drive(&app, &id, |_| 0).await }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), reference);
    }
    let list = call(&app, Method::GET, "/surveys", None).await;
    assert_eq!(list.body[0]["sessions"], 17);
}

#[tokio::test]
async fn openapi_document_is_served() {
    let r = call(&app(), Method::GET, "/openapi.json", None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.body["openapi"], "3.1.0");
    for path in ["/surveys", "/surveys/{id}/sessions", "/sessions/{id}/answers", "/sessions/{id}/explain"] {
        assert!(r.body["paths"].get(path).is_some(), "{path}");
    }
}
