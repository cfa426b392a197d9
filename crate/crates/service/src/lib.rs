//! HTTP/JSON service for learning spaces and live assessment sessions.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/spaces` | `{format, text}` |
//! | GET | `/spaces/{id}` | |
//! | GET | `/spaces/{id}/states` | |
//! | POST | `/sessions` | `{space_id, config?}` |
//! | GET | `/sessions/{id}` | |
//! | POST | `/sessions/{id}/answer` | `{concept, correct}` |
//! | DELETE | `/sessions/{id}` | |

pub mod api;
pub mod error;

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State as Extract};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use learnspace::assessment::AssessmentLoop;
use learnspace::base_dimension::DimensionReport;
use learnspace::formats::{parse_space, Format};
use learnspace::{AnySpace, LearningSpace, SequenceSpace};
use serde_json::json;
use tower_http::services::ServeDir;

use api::*;
use error::ApiError;

/// Spaces with more states than this report no count and cannot be listed.
pub const DEFAULT_STATE_CAP: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub state_cap: u64,
    /// Append one JSON line per transcript event to this file.
    pub persist: Option<PathBuf>,
    /// Directory served for paths not matched by the API.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { state_cap: DEFAULT_STATE_CAP, persist: None, static_dir: None }
    }
}

struct StoredSpace {
    space: AnySpace,
    sequences: Arc<SequenceSpace>,
    view: SpaceView,
}

struct Session {
    space_id: String,
    assessment: AssessmentLoop,
    persisted: usize,
}

#[derive(Default)]
struct Store {
    spaces: RwLock<HashMap<String, Arc<StoredSpace>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_space: AtomicU64,
    next_session: AtomicU64,
}

/// Shared state behind the router.
#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
    config: Arc<ServiceConfig>,
    log: Option<Arc<Mutex<File>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> std::io::Result<Self> {
        let log = match &config.persist {
            Some(p) => Some(Arc::new(Mutex::new(OpenOptions::new().create(true).append(true).open(p)?))),
            None => None,
        };
        Ok(Self { store: Arc::default(), config: Arc::new(config), log })
    }

    fn space(&self, id: &str) -> Result<Arc<StoredSpace>, ApiError> {
        self.store.spaces.read().expect("lock").get(id).cloned().ok_or_else(|| ApiError::not_found("space", id))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.store.sessions.read().expect("lock").get(id).cloned().ok_or_else(|| ApiError::not_found("session", id))
    }

    /// Writes the transcript events not yet on disk.
    fn persist(&self, id: &str, s: &mut Session) {
        let Some(log) = &self.log else { return };
        let d = s.assessment.domain().clone();
        let events = &s.assessment.transcript().events[s.persisted..];
        let mut f = log.lock().expect("lock");
        for e in events {
            let line = json!({ "session": id, "space": s.space_id, "event": EventView::new(e, &d) });
            if let Err(err) = writeln!(f, "{line}") {
                log::warn!("persisting session {id}: {err}");
                return;
            }
        }
        s.persisted += events.len();
    }
}

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/spaces", post(create_space))
        .route("/spaces/{id}", get(get_space))
        .route("/spaces/{id}/states", get(list_states))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/answer", post(answer));
    let api = match &state.config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    api.with_state(state)
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let app = router(AppState::new(config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn create_space(
    Extract(st): Extract<AppState>,
    body: Result<Json<CreateSpace>, JsonRejection>,
) -> Result<(StatusCode, Json<SpaceView>), ApiError> {
    let Json(body) = body?;
    let format = Format::from_extension(&body.format)
        .ok_or_else(|| ApiError::bad_request(format!("unknown format {:?}; use hasse, seqs or states", body.format)))?;
    let id = format!("space-{}", st.store.next_space.fetch_add(1, Ordering::Relaxed) + 1);
    let cap = st.config.state_cap;
    let view_id = id.clone();
    let stored = blocking(move || {
        let space = parse_space(&body.text, format)?;
        let m = space.minimize()?;
        let dims = DimensionReport::from_minimized(&m);
        let d = m.space.domain().clone();
        let view = SpaceView {
            schema_version: SCHEMA_VERSION,
            space_id: view_id,
            format: format.extension().to_string(),
            n: space.n(),
            concepts: d.labels().to_vec(),
            state_count: space.count_capped(cap),
            dim_b: dims.dim_b,
            dim_c: dims.dim_c,
            sequences: m.space.sequences().iter().map(|s| s.iter().map(|&x| d.label(x).to_string()).collect()).collect(),
        };
        Ok(StoredSpace { space, sequences: Arc::new(m.space), view })
    })
    .await?;
    let view = stored.view.clone();
    st.store.spaces.write().expect("lock").insert(id, Arc::new(stored));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_space(Extract(st): Extract<AppState>, Path(id): Path<String>) -> Result<Json<SpaceView>, ApiError> {
    Ok(Json(st.space(&id)?.view.clone()))
}

async fn list_states(Extract(st): Extract<AppState>, Path(id): Path<String>) -> Result<Json<StatesView>, ApiError> {
    let sp = st.space(&id)?;
    if sp.view.state_count.is_none() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("space {id} has more than {} states", st.config.state_cap),
        ));
    }
    blocking(move || {
        let fam = learnspace::collect_family(&sp.space)?;
        let d = sp.space.domain();
        Ok(Json(StatesView {
            schema_version: SCHEMA_VERSION,
            space_id: id,
            states: fam.sorted().iter().map(|s| labels(d, s)).collect(),
        }))
    })
    .await
}

async fn create_session(
    Extract(st): Extract<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(body) = body?;
    let cfg = body.config.to_config()?;
    let sp = st.space(&body.space_id)?;
    let id = format!("session-{}", st.store.next_session.fetch_add(1, Ordering::Relaxed) + 1);
    let (id2, st2) = (id.clone(), st.clone());
    let (session, view) = blocking(move || {
        let assessment = AssessmentLoop::new(sp.sequences.clone(), cfg)?;
        let mut s = Session { space_id: body.space_id, assessment, persisted: 0 };
        st2.persist(&id2, &mut s);
        let view = SessionView::new(&id2, &s.space_id, &s.assessment, false)?;
        Ok((s, view))
    })
    .await?;
    st.store.sessions.write().expect("lock").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(Extract(st): Extract<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let s = st.session(&id)?;
    let s = s.lock().expect("lock");
    Ok(Json(SessionView::new(&id, &s.space_id, &s.assessment, true)?))
}

async fn answer(
    Extract(st): Extract<AppState>,
    Path(id): Path<String>,
    body: Result<Json<AnswerBody>, JsonRejection>,
) -> Result<Json<SessionView>, ApiError> {
    let Json(body) = body?;
    let s = st.session(&id)?;
    blocking(move || {
        let mut s = s.lock().expect("lock");
        let concept = s
            .assessment
            .domain()
            .index_of(&body.concept)
            .ok_or_else(|| ApiError::bad_request(format!("unknown concept {:?}", body.concept)))?;
        s.assessment.answer(concept, body.correct)?;
        st.persist(&id, &mut s);
        Ok(Json(SessionView::new(&id, &s.space_id, &s.assessment, false)?))
    })
    .await
}

async fn delete_session(Extract(st): Extract<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match st.store.sessions.write().expect("lock").remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found("session", &id)),
    }
}
