//! Local HTTP stepping service.
//!
//! Each session holds a program and a walk through its transition system.
//! Sessions are kept in memory, at most [`SESSION_CAP`] of them, evicting
//! the least recently used. Requests on one session are serialized.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cna_core::process::{format_process, parse_program, Definitions, ParseError, Process};
use cna_core::semantics::{build_lts, sorted_steps, Bounds, SemanticsError};
use cna_core::NormalLabel;
use lru::LruCache;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::export::{blocks_doc, to_doc, LinkDoc, LtsDoc};

pub const SESSION_CAP: usize = 64;
pub const DEFAULT_PORT: u16 = 7401;

#[derive(Debug, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> ApiError {
        ApiError { status, code: code.to_string(), message: message.into() }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, e.kind.code(), e.to_string())
    }
}

impl From<SemanticsError> for ApiError {
    fn from(e: SemanticsError) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TransitionView {
    pub index: usize,
    pub blocks: Vec<Vec<LinkDoc>>,
    pub essential: String,
    pub target_preview: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Loaded {
    pub session_id: String,
    pub state_id: usize,
    pub term: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StateView {
    pub state_id: usize,
    pub term: String,
    pub transitions: Vec<TransitionView>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct LoadRequest {
    pub source: String,
    pub main: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct StepRequest {
    pub index: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct LtsQuery {
    pub max_states: Option<usize>,
}

struct Step {
    label: NormalLabel,
    target: Process,
    key: String,
}

/// A walk through one program's transition system. State ids number
/// terms in the order the session first visits them; `history` replays
/// from state 0 to `current`.
pub struct Session {
    defs: Definitions,
    bounds: Bounds,
    terms: Vec<(Process, String)>,
    ids: HashMap<String, usize>,
    current: usize,
    history: Vec<(usize, usize)>,
    steps: Vec<Step>,
}

impl Session {
    pub fn start(defs: Definitions, initial: &Process, bounds: Bounds) -> Result<Session, SemanticsError> {
        let root = if bounds.normalize { initial.struct_normalize() } else { initial.clone() }.canonicalize();
        let key = format_process(&root);
        let mut s = Session {
            defs,
            bounds,
            terms: vec![(root, key.clone())],
            ids: HashMap::from([(key, 0)]),
            current: 0,
            history: Vec::new(),
            steps: Vec::new(),
        };
        s.refresh()?;
        Ok(s)
    }

    fn refresh(&mut self) -> Result<(), SemanticsError> {
        let term = &self.terms[self.current].0;
        self.steps = sorted_steps(term, &self.defs, &self.bounds)?
            .into_iter()
            .map(|(label, target, key)| Step { label, target, key })
            .collect();
        Ok(())
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn term(&self) -> &str {
        &self.terms[self.current].1
    }

    pub fn history(&self) -> &[(usize, usize)] {
        &self.history
    }

    pub fn transitions(&self) -> Vec<TransitionView> {
        self.steps
            .iter()
            .enumerate()
            .map(|(index, s)| TransitionView {
                index,
                blocks: blocks_doc(&s.label),
                essential: s.label.reduce().to_string(),
                target_preview: s.key.clone(),
            })
            .collect()
    }

    pub fn view(&self) -> StateView {
        StateView { state_id: self.current, term: self.term().to_string(), transitions: self.transitions() }
    }

    pub fn step(&mut self, index: usize) -> Result<(), ApiError> {
        let Some(step) = self.steps.get(index) else {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "NoSuchTransition",
                format!("state {} has {} transitions; index {index} is out of range", self.current, self.steps.len()),
            ));
        };
        let next = match self.ids.get(&step.key) {
            Some(&id) => id,
            None => {
                let id = self.terms.len();
                self.ids.insert(step.key.clone(), id);
                self.terms.push((step.target.clone(), step.key.clone()));
                id
            }
        };
        self.history.push((self.current, index));
        self.current = next;
        self.refresh().map_err(ApiError::from)
    }

    pub fn undo(&mut self) -> Result<(), ApiError> {
        let Some((prev, _)) = self.history.pop() else {
            return Err(ApiError::new(StatusCode::CONFLICT, "NothingToUndo", "the session is at its initial state"));
        };
        self.current = prev;
        self.refresh().map_err(ApiError::from)
    }

    pub fn lts(&self, max_states: Option<usize>) -> Result<LtsDoc, SemanticsError> {
        let bounds = match max_states {
            Some(n) => self.bounds.with_max_states(n),
            None => self.bounds,
        };
        Ok(to_doc(&build_lts(&self.terms[0].0, &self.defs, &bounds)?))
    }
}

type Shared = Arc<Mutex<Session>>;

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<LruCache<String, Shared>>>,
    bounds: Bounds,
    root: Option<PathBuf>,
}

impl AppState {
    pub fn new(bounds: Bounds, root: Option<PathBuf>) -> AppState {
        let cap = NonZeroUsize::new(SESSION_CAP).expect("positive cap");
        AppState { sessions: Arc::new(Mutex::new(LruCache::new(cap))), bounds, root }
    }

    fn session(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}")))
    }
}

async fn load(State(app): State<AppState>, Json(req): Json<LoadRequest>) -> ApiResult<Loaded> {
    let prog = parse_program(&req.source)?;
    let entry = req.main.as_deref().unwrap_or("main");
    if entry == "main" && prog.main.is_none() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "NoMain", "the program has no main; name an entry point"));
    }
    let p = prog.resolve(entry)?;
    let session = Session::start(prog.defs, &p, app.bounds)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let loaded = Loaded { session_id: id.clone(), state_id: session.current(), term: session.term().to_string() };
    app.sessions.lock().expect("session table").put(id, Arc::new(Mutex::new(session)));
    Ok(Json(loaded))
}

async fn transitions(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Vec<TransitionView>> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session");
    Ok(Json(s.transitions()))
}

async fn step(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<StepRequest>,
) -> ApiResult<StateView> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session");
    s.step(req.index)?;
    Ok(Json(s.view()))
}

async fn undo(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<StateView> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session");
    s.undo()?;
    Ok(Json(s.view()))
}

async fn lts(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<LtsQuery>,
) -> ApiResult<LtsDoc> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session");
    Ok(Json(s.lts(q.max_states)?))
}

fn program_files(root: &Path) -> std::io::Result<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(root)?
        .filter_map(Result::ok)
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".cna"))
        .collect();
    names.sort();
    Ok(names)
}

fn root_of(app: &AppState) -> Result<&Path, ApiError> {
    app.root
        .as_deref()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "NoProgramRoot", "the service was started without a program directory"))
}

async fn list_programs(State(app): State<AppState>) -> ApiResult<Vec<String>> {
    let root = root_of(&app)?;
    program_files(root)
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Io", e.to_string()))
}

async fn read_program(State(app): State<AppState>, UrlPath(name): UrlPath<String>) -> ApiResult<serde_json::Value> {
    let root = root_of(&app)?;
    let listed = program_files(root).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Io", e.to_string()))?;
    if !listed.contains(&name) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "UnknownProgram", format!("no program {name}")));
    }
    let source = std::fs::read_to_string(root.join(&name))
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Io", e.to_string()))?;
    Ok(Json(json!({ "name": name, "source": source })))
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/api/program", post(load))
        .route("/api/programs", get(list_programs))
        .route("/api/programs/{name}", get(read_program))
        .route("/api/session/{id}/transitions", get(transitions))
        .route("/api/session/{id}/step", post(step))
        .route("/api/session/{id}/undo", post(undo))
        .route("/api/session/{id}/lts", get(lts))
        .with_state(app)
}

/// Serves on the loopback interface until the process ends.
pub async fn serve(port: u16, app: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    axum::serve(listener, router(app)).await
}
