use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use cna_cli::service::{router, AppState};
use cna_core::process::parse_program;
use cna_core::semantics::{build_lts, Bounds};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const BLIND: &str = include_str!("../../core/examples/blind.cna");
const DYNAMIC: &str = include_str!("../../core/examples/dynamic.cna");

fn app() -> Router {
    router(AppState::new(Bounds::default(), None))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn load(app: &Router, source: &str) -> Value {
    let (status, body) = call(app, "POST", "/api/program", Some(json!({ "source": source }))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body
}

fn essentials(transitions: &Value) -> Vec<String> {
    transitions.as_array().unwrap().iter().map(|t| t["essential"].as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn blind_routing_offers_a_silent_request() {
    let app = app();
    let loaded = load(&app, BLIND).await;
    assert_eq!(loaded["stateId"], 0);
    let id = loaded["sessionId"].as_str().unwrap();
    let (status, ts) = call(&app, "GET", &format!("/api/session/{id}/transitions"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(essentials(&ts).iter().any(|e| e == "tau\\tau"), "{ts}");
    let first = &ts[0];
    for field in ["index", "blocks", "essential", "targetPreview"] {
        assert!(first.get(field).is_some(), "missing {field} in {first}");
    }
}

#[tokio::test]
async fn step_then_undo_restores_the_state() {
    let app = app();
    let loaded = load(&app, BLIND).await;
    let id = loaded["sessionId"].as_str().unwrap();
    let (status, stepped) = call(&app, "POST", &format!("/api/session/{id}/step"), Some(json!({ "index": 2 }))).await;
    assert_eq!(status, StatusCode::OK, "{stepped}");
    assert_ne!(stepped["term"], loaded["term"]);
    let (status, back) = call(&app, "POST", &format!("/api/session/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(back["stateId"], loaded["stateId"]);
    assert_eq!(back["term"], loaded["term"]);
    let (status, err) = call(&app, "POST", &format!("/api/session/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["code"], "NothingToUndo");
}

#[tokio::test]
async fn error_documents() {
    let app = app();
    let (status, err) = call(&app, "POST", "/api/program", Some(json!({ "source": "main := a\\b ." }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "SyntaxError");
    assert!(err["error"]["message"].is_string());

    let (status, err) = call(&app, "GET", "/api/session/nope/transitions", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"]["code"], "UnknownSession");

    let loaded = load(&app, "main := a\\b . 0").await;
    let id = loaded["sessionId"].as_str().unwrap();
    let (status, err) = call(&app, "POST", &format!("/api/session/{id}/step"), Some(json!({ "index": 7 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"]["code"], "NoSuchTransition");
}

#[tokio::test]
async fn named_entry_points() {
    let app = app();
    let src = "R(a, b) := a\\b . R(a, b)";
    let (status, err) = call(&app, "POST", "/api/program", Some(json!({ "source": src }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["code"], "NoMain");
    let (status, loaded) = call(&app, "POST", "/api/program", Some(json!({ "source": src, "main": "R" }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(loaded["term"], "R(a, b)");
}

#[tokio::test]
async fn lts_endpoint_returns_the_structured_document() {
    let app = app();
    let loaded = load(&app, DYNAMIC).await;
    let id = loaded["sessionId"].as_str().unwrap();
    let (status, doc) = call(&app, "GET", &format!("/api/session/{id}/lts?max_states=3"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["version"], "1");
    assert_eq!(doc["complete"], false);
    assert_eq!(doc["states"].as_array().unwrap().len(), 3);
    let t = &doc["transitions"][0];
    assert!(t["blocks"][0][0]["s"].is_string() && t["blocks"][0][0]["t"].is_string());
}

/// The states and labels met while stepping are exactly those of the
/// transition system along the same path.
#[tokio::test]
async fn stepping_follows_the_lts() {
    let app = app();
    let prog = parse_program(DYNAMIC).unwrap();
    let lts = build_lts(&prog.main.clone().unwrap(), &prog.defs, &Bounds::default().with_max_states(50)).unwrap();
    let loaded = load(&app, DYNAMIC).await;
    let id = loaded["sessionId"].as_str().unwrap();
    let mut state = lts.initial;
    assert_eq!(loaded["term"], lts.states[state].key);
    for choice in [0usize, 1, 0, 2, 1] {
        let (_, ts) = call(&app, "GET", &format!("/api/session/{id}/transitions"), None).await;
        let from_lts: Vec<String> = lts.outgoing(state).iter().map(|t| t.essential().to_string()).collect();
        assert_eq!(essentials(&ts), from_lts);
        let choice = choice % from_lts.len();
        let (_, stepped) = call(&app, "POST", &format!("/api/session/{id}/step"), Some(json!({ "index": choice }))).await;
        state = lts.outgoing(state)[choice].dst;
        assert_eq!(stepped["term"], lts.states[state].key);
    }
}

#[tokio::test]
async fn dynamic_link_appears_after_add() {
    let app = app();
    let loaded = load(&app, DYNAMIC).await;
    let id = loaded["sessionId"].as_str().unwrap();
    let (_, ts) = call(&app, "GET", &format!("/api/session/{id}/transitions"), None).await;
    assert_eq!(essentials(&ts), ["add\\tau"]);
    let (_, stepped) = call(&app, "POST", &format!("/api/session/{id}/step"), Some(json!({ "index": 0 }))).await;
    assert!(essentials(&stepped["transitions"]).contains(&"a1\\b1".to_string()), "{stepped}");
}

#[tokio::test]
async fn sessions_are_evicted_least_recently_used_first() {
    let app = app();
    let first = load(&app, "main := a\\b . 0").await;
    let first = first["sessionId"].as_str().unwrap().to_string();
    let mut last = String::new();
    for _ in 0..cna_cli::service::SESSION_CAP {
        last = load(&app, "main := 0").await["sessionId"].as_str().unwrap().to_string();
    }
    let (status, _) = call(&app, "GET", &format!("/api/session/{first}/transitions"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", &format!("/api/session/{last}/transitions"), None).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn program_directory_listing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.cna"), BLIND).unwrap();
    std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
    let app = router(AppState::new(Bounds::default(), Some(dir.path().to_path_buf())));
    let (status, list) = call(&app, "GET", "/api/programs", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list, json!(["b.cna"]));
    let (status, file) = call(&app, "GET", "/api/programs/b.cna", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(file["source"], BLIND);
    let (status, _) = call(&app, "GET", "/api/programs/notes.txt", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
