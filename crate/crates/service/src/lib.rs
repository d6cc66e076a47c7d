//! HTTP/JSON facade over the feasibility library for what-if exploration.
//!
//! Every handler is a pure function of the request and the immutable
//! [`AppState`] built at startup, so identical requests always get identical
//! bodies.
//!
//! Routes:
//!
//! * `POST /api/evaluate` — [`ScenarioRequest`] → [`EvaluationResponse`]
//! * `POST /api/epv-combine` — [`EpvCombineRequest`] → [`EpvCombineResponse`]
//! * `GET /api/maps` — names of the preloaded value maps
//! * `GET /health` — liveness

use std::collections::BTreeMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use passfeas_core::epv::{combine_with_orientation, RegionSize, ValueKind};
use passfeas_core::feasibility::{evaluate_scenario, FeasibilityError, ModelParams, Scenario};
use passfeas_core::io::{IoError, LoadOptions, ScenarioRecord, ValueMap};
use passfeas_core::wire::{
    scenario_from_record, EpvCombineRequest, EpvCombineResponse, ErrorBody, EvaluationResponse, MapsResponse,
    ScenarioRequest,
};
use thiserror::Error;
use tokio::net::TcpListener;

/// Extensions recognized when loading a map directory.
pub const MAP_EXTENSIONS: [&str; 2] = ["txt", "map"];

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown value map `{0}`")]
    UnknownMap(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("map directory {path}: {source}")]
    MapDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Params(#[from] FeasibilityError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server: {0}")]
    Serve(#[source] std::io::Error),
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::UnknownMap(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(ErrorBody { error: self.to_string() })).into_response()
    }
}

impl From<JsonRejection> for ServiceError {
    fn from(r: JsonRejection) -> Self {
        ServiceError::BadRequest(r.body_text())
    }
}

/// Startup configuration. `psi`, `j` and `window` override the model
/// defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub psi: f64,
    pub j: usize,
    pub window: u32,
    pub map_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let params = ModelParams::default();
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            psi: params.psi(),
            j: params.j(),
            window: LoadOptions::default().window,
            map_dir: None,
        }
    }
}

/// Shared, read-only state.
#[derive(Debug, Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    params: ModelParams,
    options: LoadOptions,
    maps: BTreeMap<String, ValueMap>,
}

impl AppState {
    pub fn new(params: ModelParams, options: LoadOptions, maps: BTreeMap<String, ValueMap>) -> Self {
        Self {
            inner: Arc::new(Inner { params, options, maps }),
        }
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let defaults = ModelParams::default();
        let params = ModelParams::new(config.psi, defaults.z(), config.j)?;
        let maps = match &config.map_dir {
            Some(dir) => load_map_dir(dir)?,
            None => BTreeMap::new(),
        };
        Ok(Self::new(params, LoadOptions { window: config.window }, maps))
    }

    pub fn params(&self) -> &ModelParams {
        &self.inner.params
    }

    pub fn map_names(&self) -> Vec<String> {
        self.inner.maps.keys().cloned().collect()
    }

    fn map(&self, name: &str) -> Result<&ValueMap, ServiceError> {
        self.inner.maps.get(name).ok_or_else(|| ServiceError::UnknownMap(name.to_string()))
    }

    fn scenario(&self, record: &ScenarioRecord) -> Result<(Scenario, Vec<String>), ServiceError> {
        let (scenario, mut warnings) =
            scenario_from_record(record, &self.inner.options).map_err(|e| ServiceError::BadRequest(format!("scenario: {e}")))?;
        if scenario.passer.role.is_none() {
            warnings.push(format!("passer `{}` has no role", scenario.passer.id));
        }
        let unroled = scenario.receivers.iter().filter(|r| r.role.is_none()).count();
        if unroled > 0 {
            warnings.push(format!("{unroled} receivers have no role"));
        }
        Ok((scenario, warnings))
    }
}

/// Loads every `*.txt` / `*.map` file in `dir`, keyed by file stem.
pub fn load_map_dir(dir: &Path) -> Result<BTreeMap<String, ValueMap>, ServiceError> {
    let dir_err = |source| ServiceError::MapDir {
        path: dir.to_path_buf(),
        source,
    };
    let mut maps = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(dir_err)? {
        let path = entry.map_err(dir_err)?.path();
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| MAP_EXTENSIONS.contains(&e));
        if !path.is_file() || !ext_ok {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        maps.insert(stem.to_string(), ValueMap::load(&path)?);
    }
    Ok(maps)
}

fn bad_request(e: impl ToString) -> ServiceError {
    ServiceError::BadRequest(e.to_string())
}

async fn health() -> &'static str {
    "ok"
}

async fn maps(State(state): State<AppState>) -> Json<MapsResponse> {
    Json(MapsResponse { maps: state.map_names() })
}

async fn evaluate(
    State(state): State<AppState>,
    body: Result<Json<ScenarioRequest>, JsonRejection>,
) -> Result<Json<EvaluationResponse>, ServiceError> {
    let Json(req) = body?;
    let map = req.map.as_deref().map(|name| state.map(name).map(|m| (name, m))).transpose()?;
    let (scenario, warnings) = state.scenario(&req.scenario)?;
    let eval = evaluate_scenario(&scenario, state.params(), req.mode).map_err(bad_request)?;
    let mut response = EvaluationResponse::from_evaluation(&scenario, &eval, warnings);
    if let Some((name, map)) = map {
        let combined = combine_with_orientation(
            &scenario,
            map,
            state.params(),
            ValueKind::PassProbability,
            RegionSize::for_map(map),
        )
        .map_err(bad_request)?;
        response.epv = Some(EpvCombineResponse::new(name, combined));
    }
    Ok(Json(response))
}

async fn epv_combine(
    State(state): State<AppState>,
    body: Result<Json<EpvCombineRequest>, JsonRejection>,
) -> Result<Json<EpvCombineResponse>, ServiceError> {
    let Json(req) = body?;
    let map = state.map(&req.map)?;
    let (scenario, _) = state.scenario(&req.scenario)?;
    let size = req.region_size(RegionSize::for_map(map));
    let combined = combine_with_orientation(&scenario, map, state.params(), req.kind, size).map_err(bad_request)?;
    Ok(Json(EpvCombineResponse::new(req.map.clone(), combined)))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/api/maps", get(maps))
        .route("/api/evaluate", post(evaluate))
        .route("/api/epv-combine", post(epv_combine))
        .with_state(state)
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve_with_shutdown(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServiceError::Serve)
}

/// Binds `config.listen` and serves until Ctrl-C.
pub async fn serve(config: &ServiceConfig) -> Result<(), ServiceError> {
    let state = AppState::from_config(config)?;
    let listener = TcpListener::bind(config.listen).await.map_err(|source| ServiceError::Bind {
        addr: config.listen,
        source,
    })?;
    let addr = listener.local_addr().map_err(ServiceError::Serve)?;
    tracing::info!(%addr, maps = state.map_names().len(), "listening");
    serve_with_shutdown(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
