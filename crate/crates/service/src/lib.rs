//! HTTP/JSON facade for the design studio.
//!
//! Sessions live in memory and hold one mechanism each. Every edit bumps
//! the session version; an edit based on an older version is refused with
//! 409. Geometry is indexed by drive angle, so clients never handle the
//! parameter at infinity. Collision checks run as background jobs on a
//! bounded pool and are polled via `/jobs/{id}`.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/sessions` | `{mechanism}`, `{poses}` or `{curve}` |
//! | GET, DELETE | `/sessions/{id}` | summary with collision status |
//! | GET | `/sessions/{id}/geometry?angle=φ` | axes, segments, tool pose |
//! | PATCH | `/sessions/{id}/connection-points` | `{joint, cp0, cp1, version}` |
//! | POST | `/sessions/{id}/collision-check` | starts a job |
//! | GET | `/jobs/{id}` | job state and report |
//! | GET | `/sessions/{id}/design?scale=s` | DH table, JSON or CSV |
//! | GET | `/sessions/{id}/export` | `.rlmech` download |

mod error;

pub use error::ApiError;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use ratlink::collision::{collision_check_with_workers, EventRecord, COLLISION_TOL};
use ratlink::design::{export_design, get_design, DesignFormat};
use ratlink::input::{curve_from_rows, poses_from_rows, Coefficient};
use ratlink::mechanism::{Configuration, RationalMechanism, DEFAULT_JOINT_LENGTH};
use ratlink::quatcore::{DualQuaternion, Vec3};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tokio::sync::Semaphore;

pub const DEFAULT_PORT: u16 = 8639;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Threads used by one collision job.
    pub workers: usize,
    /// Collision jobs running at the same time.
    pub max_jobs: usize,
    pub tolerance: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_jobs: 2,
            tolerance: COLLISION_TOL,
        }
    }
}

/// Result of one collision job.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u64,
    pub tolerance: f64,
    pub collision_free: bool,
    pub events: Vec<EventRecord>,
}

struct Session {
    mechanism: Arc<RationalMechanism>,
    version: u64,
    report: Option<Report>,
    /// Job id and the version it checks.
    running: Option<(String, u64)>,
}

impl Session {
    fn status(&self) -> &'static str {
        if matches!(&self.running, Some((_, v)) if *v == self.version) {
            return "running";
        }
        match &self.report {
            None => "unchecked",
            Some(r) if r.version != self.version => "stale",
            Some(r) if r.collision_free => "collision-free",
            Some(_) => "colliding",
        }
    }

    fn summary(&self, id: &str) -> Value {
        let m = &self.mechanism;
        let cps: Vec<Value> = m
            .connection_points()
            .iter()
            .enumerate()
            .map(|(joint, c)| json!({ "joint": joint, "cp0": c.cp0, "cp1": c.cp1 }))
            .collect();
        json!({
            "id": id,
            "version": self.version,
            "status": self.status(),
            "dirty": self.report.as_ref().is_some_and(|r| r.version != self.version),
            "joint_count": m.joint_count(),
            "exact": m.curve().is_exact(),
            "scale": m.scale(),
            "connection_points": cps,
            "metadata": m.metadata(),
        })
    }
}

enum JobState {
    Running,
    Done(Report),
    Failed { name: &'static str, message: String },
}

struct Job {
    session: String,
    version: u64,
    state: JobState,
}

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<RwLock<Session>>>>,
    jobs: RwLock<HashMap<String, Job>>,
    next_id: AtomicU64,
    permits: Arc<Semaphore>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        let permits = Arc::new(Semaphore::new(config.max_jobs.max(1)));
        Arc::new(Self {
            config,
            sessions: RwLock::default(),
            jobs: RwLock::default(),
            next_id: AtomicU64::new(1),
            permits,
        })
    }

    fn next(&self, prefix: char) -> String {
        format!("{prefix}{}", self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    /// Opens a session on `m` and returns its id.
    pub fn insert_mechanism(&self, m: RationalMechanism) -> String {
        let id = self.next('s');
        let s = Session { mechanism: Arc::new(m), version: 1, report: None, running: None };
        self.sessions.write().unwrap().insert(id.clone(), Arc::new(RwLock::new(s)));
        id
    }

    fn session(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions.read().unwrap().get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }

    fn finish_job(&self, job: &str, session: &str, state: JobState) {
        if let Some(s) = self.sessions.read().unwrap().get(session) {
            let mut s = s.write().unwrap();
            if matches!(&s.running, Some((j, _)) if j == job) {
                s.running = None;
            }
            if let JobState::Done(r) = &state {
                if s.report.as_ref().is_none_or(|old| old.version <= r.version) {
                    s.report = Some(r.clone());
                }
            }
        }
        if let Some(j) = self.jobs.write().unwrap().get_mut(job) {
            j.state = state;
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/geometry", get(geometry))
        .route("/sessions/{id}/connection-points", patch(edit_connection_points))
        .route("/sessions/{id}/collision-check", post(start_collision_check))
        .route("/sessions/{id}/design", get(design))
        .route("/sessions/{id}/export", get(export))
        .route("/jobs/{id}", get(get_job))
        .with_state(state)
}

pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

type Params = Query<HashMap<String, String>>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ratlink::Error::ParseError(e.to_string()).into())
}

fn number_param(q: &HashMap<String, String>, key: &str) -> Result<Option<f64>, ApiError> {
    let Some(raw) = q.get(key) else { return Ok(None) };
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(ApiError::bad_request(format!("{key} must be a finite number, got {raw:?}"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    mechanism: Option<Value>,
    poses: Option<Vec<[Coefficient; 8]>>,
    curve: Option<Vec<Vec<Coefficient>>>,
    #[serde(default)]
    metadata: Map<String, Value>,
}

fn build_mechanism(req: CreateSession) -> Result<RationalMechanism, ApiError> {
    let mut metadata = req.metadata;
    let m = match (req.mechanism, req.poses, req.curve) {
        (Some(v), None, None) => {
            let text = match v {
                Value::String(s) => s,
                v => v.to_string(),
            };
            let m = RationalMechanism::from_json(&text)?;
            let mut merged = m.metadata().clone();
            merged.append(&mut metadata);
            return Ok(m.with_metadata(merged));
        }
        (None, Some(rows), None) => {
            let ip = poses_from_rows(&rows)?.interpolate()?;
            metadata.insert("node_params".into(), json!(ip.nodes));
            RationalMechanism::from_curve(ip.curve)?
        }
        (None, None, Some(rows)) => RationalMechanism::from_curve(curve_from_rows(&rows)?)?,
        _ => return Err(ApiError::bad_request("body needs exactly one of mechanism, poses or curve")),
    };
    Ok(m.with_metadata(metadata))
}

async fn create_session(State(st): State<Arc<AppState>>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let m = tokio::task::spawn_blocking(move || build_mechanism(req))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    let id = st.insert_mechanism(m);
    let summary = st.session(&id)?.read().unwrap().summary(&id);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = st.session(&id)?;
    let s = s.read().unwrap();
    Ok(Json(s.summary(&id)))
}

async fn delete_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    st.sessions.write().unwrap().remove(&id).ok_or_else(|| ApiError::unknown_session(&id))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Serialize)]
struct ToolFrame {
    origin: [f64; 3],
    axes: [[f64; 3]; 3],
}

#[derive(Serialize)]
struct Geometry<'a> {
    session: &'a str,
    version: u64,
    #[serde(flatten)]
    configuration: Configuration,
    tool_frame: ToolFrame,
}

fn tool_frame(tool: [f64; 8]) -> Result<ToolFrame, ApiError> {
    let p = DualQuaternion::from_array(tool);
    let origin = p.act_on_point(&Vec3::zero())?;
    let axis = |v: Vec3<f64>| -> Result<[f64; 3], ApiError> { Ok((p.act_on_point(&v)? - origin.clone()).to_array()) };
    Ok(ToolFrame {
        axes: [axis(Vec3::new(1.0, 0.0, 0.0))?, axis(Vec3::new(0.0, 1.0, 0.0))?, axis(Vec3::new(0.0, 0.0, 1.0))?],
        origin: origin.to_array(),
    })
}

async fn geometry(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
) -> Result<Response, ApiError> {
    let angle = number_param(&q, "angle")?.ok_or_else(|| ApiError::bad_request("missing query parameter angle"))?;
    let (m, version) = {
        let s = st.session(&id)?;
        let s = s.read().unwrap();
        (s.mechanism.clone(), s.version)
    };
    let configuration = m.configuration(angle)?;
    let tool_frame = tool_frame(configuration.tool)?;
    Ok(Json(Geometry { session: &id, version, configuration, tool_frame }).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionPointEdit {
    joint: usize,
    cp0: f64,
    cp1: f64,
    version: u64,
}

async fn edit_connection_points(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let edit: ConnectionPointEdit = parse_body(&body)?;
    let s = st.session(&id)?;
    let mut s = s.write().unwrap();
    if edit.version != s.version {
        return Err(ApiError::stale(s.version, edit.version));
    }
    let m = s.mechanism.set_connection_points(edit.joint, edit.cp0, edit.cp1)?;
    s.mechanism = Arc::new(m);
    s.version += 1;
    Ok(Json(s.summary(&id)))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CheckRequest {
    tolerance: Option<f64>,
}

async fn start_collision_check(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: CheckRequest =
        if body.iter().all(u8::is_ascii_whitespace) { CheckRequest::default() } else { parse_body(&body)? };
    let tol = req.tolerance.unwrap_or(st.config.tolerance);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ApiError::bad_request(format!("tolerance must be positive, got {tol}")));
    }
    let job = st.next('j');
    let (m, version) = {
        let s = st.session(&id)?;
        let mut s = s.write().unwrap();
        s.running = Some((job.clone(), s.version));
        (s.mechanism.clone(), s.version)
    };
    st.jobs.write().unwrap().insert(job.clone(), Job { session: id.clone(), version, state: JobState::Running });
    let (state, job_id, session) = (st.clone(), job.clone(), id.clone());
    tokio::spawn(async move {
        let permit = state.permits.clone().acquire_owned().await.expect("job pool is never closed");
        let workers = state.config.workers;
        let result = tokio::task::spawn_blocking(move || collision_check_with_workers(&m, tol, workers)).await;
        drop(permit);
        let outcome = match result {
            Ok(Ok(events)) => JobState::Done(Report {
                version,
                tolerance: tol,
                collision_free: events.is_empty(),
                events: events.iter().map(EventRecord::from).collect(),
            }),
            Ok(Err(e)) => JobState::Failed { name: e.name(), message: e.to_string() },
            Err(e) => JobState::Failed { name: "JobPanicked", message: e.to_string() },
        };
        state.finish_job(&job_id, &session, outcome);
    });
    Ok((StatusCode::ACCEPTED, Json(json!({ "job": job, "session": id, "version": version, "state": "running" }))))
}

async fn get_job(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let jobs = st.jobs.read().unwrap();
    let j = jobs.get(&id).ok_or_else(|| ApiError::unknown_job(&id))?;
    let mut out = json!({ "id": id, "session": j.session, "version": j.version });
    let (state, extra) = match &j.state {
        JobState::Running => ("running", None),
        JobState::Done(r) => ("done", Some(("report", json!(r)))),
        JobState::Failed { name, message } => ("failed", Some(("error", json!({ "error": name, "message": message })))),
    };
    out["state"] = json!(state);
    if let Some((k, v)) = extra {
        out[k] = v;
    }
    Ok(Json(out))
}

async fn design(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
) -> Result<Response, ApiError> {
    let m = st.session(&id)?.read().unwrap().mechanism.clone();
    let scale = number_param(&q, "scale")?.unwrap_or(m.scale());
    let joint_length = number_param(&q, "joint_length")?.unwrap_or(DEFAULT_JOINT_LENGTH);
    let (format, content_type) = match q.get("format").map(String::as_str) {
        None | Some("json") => (DesignFormat::Json, "application/json"),
        Some("csv") => (DesignFormat::Csv, "text/csv"),
        Some(f) => return Err(ApiError::bad_request(format!("unknown format {f:?}"))),
    };
    let table = get_design(&m, scale, joint_length)?;
    Ok(([(header::CONTENT_TYPE, content_type)], export_design(&table, format)).into_response())
}

async fn export(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Params,
) -> Result<Response, ApiError> {
    let m = st.session(&id)?.read().unwrap().mechanism.clone();
    let name = q.get("filename").map_or("mechanism.rlmech", String::as_str);
    if name.is_empty() || name.contains(['"', '/', '\\']) || name.chars().any(char::is_control) {
        return Err(ApiError::bad_request(format!("invalid file name {name:?}")));
    }
    let disposition = format!("attachment; filename=\"{name}\"");
    Ok((
        [(header::CONTENT_TYPE, "application/octet-stream".to_string()), (header::CONTENT_DISPOSITION, disposition)],
        m.to_json(),
    )
        .into_response())
}
