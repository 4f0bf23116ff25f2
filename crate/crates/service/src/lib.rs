//! JSON-over-HTTP front end for the launch-decision engine.
//!
//! Every handler computes on an immutable registry snapshot; writes go through the
//! registry's single writer. Computation endpoints render with the same serializer as the
//! command line, so identical requests produce byte-identical bodies.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use launch_decision::analysis::{self, DecideRequest, SpaceRequest};
use launch_decision::experiment::{ExperimentRecord, Provenance, Violation};
use launch_decision::prior::ShrinkageLevel;
use launch_decision::registry::RegistryStore;
use launch_decision::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

/// Error body: `{"status": 404, "code": "not_found", "message": "..."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            code: code.into(),
            message: message.into(),
            violations: Vec::new(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            Error::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            Error::DuplicateId(_) => (StatusCode::CONFLICT, "duplicate_id"),
            Error::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "validation_failed"),
            Error::TooLarge { .. } => (StatusCode::PAYLOAD_TOO_LARGE, "too_large"),
            Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
            _ => (StatusCode::UNPROCESSABLE_ENTITY, "unprocessable"),
        };
        let mut out = ApiError::new(status, code, message);
        if let Error::Validation(v) = e {
            out.violations = v;
        }
        out
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, json_body(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// The shared serializer plus a trailing newline, matching command-line output.
pub fn render<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(analysis::to_json(value)? + "\n")
}

fn json_body<T: Serialize>(value: &T) -> Response {
    match render(value) {
        Ok(body) => ([(header::CONTENT_TYPE, "application/json")], body).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_body",
                e.to_string(),
            ),
            _ => ApiError::new(StatusCode::BAD_REQUEST, "invalid_json", e.to_string()),
        }
    })
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> Result<T, Error> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<RegistryStore>,
}

/// One row of `GET /experiments`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub id: String,
    pub timestamp: i64,
    pub metrics: Vec<String>,
    pub treatment_label: Option<String>,
    pub provenance: Provenance,
}

impl From<&ExperimentRecord> for ExperimentSummary {
    fn from(r: &ExperimentRecord) -> Self {
        Self {
            id: r.id.clone(),
            timestamp: r.timestamp,
            metrics: r.schema.names.clone(),
            treatment_label: r.treatment_label.clone(),
            provenance: r.provenance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

async fn health() -> Response {
    json_body(&serde_json::json!({ "status": "ok" }))
}

async fn list_experiments(State(state): State<AppState>) -> Response {
    let snap = state.store.snapshot();
    let rows: Vec<ExperimentSummary> = snap.records().iter().map(ExperimentSummary::from).collect();
    json_body(&rows)
}

async fn create_experiment(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let rec: ExperimentRecord = parse_body(&body)?;
    let id = rec.id.clone();
    let store = state.store.clone();
    blocking(move || store.append(rec)).await?;
    tracing::info!(%id, "experiment registered");
    Ok((StatusCode::CREATED, json_body(&Created { id })).into_response())
}

#[derive(Debug, Deserialize)]
struct PosteriorQuery {
    k: Option<String>,
    level: Option<f64>,
}

async fn get_posterior(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<PosteriorQuery>,
) -> ApiResult<Response> {
    let k = match q.k.as_deref() {
        None => ShrinkageLevel::ONE,
        Some(s) => s
            .parse::<ShrinkageLevel>()
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_k", e.to_string()))?,
    };
    let level = q.level.unwrap_or(launch_decision::posterior::DEFAULT_LEVEL);
    let snap = state.store.snapshot();
    let summary = blocking(move || analysis::posterior_for(&snap, &id, k, level)).await?;
    Ok(json_body(&summary))
}

async fn post_decide(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: DecideRequest = parse_body(&body)?;
    let snap = state.store.snapshot();
    let report = blocking(move || analysis::decide(&snap, &req)).await?;
    Ok(json_body(&report))
}

async fn post_decision_space(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: SpaceRequest = parse_body(&body)?;
    if req.points() > analysis::MAX_GRID_POINTS {
        return Err(Error::TooLarge {
            points: req.points(),
            limit: analysis::MAX_GRID_POINTS,
        }
        .into());
    }
    let snap = state.store.snapshot();
    let space = blocking(move || analysis::space(&snap, &req)).await?;
    Ok(json_body(&space))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
}

/// The API router. `cors_origin` of `None` allows any origin.
pub fn router(store: Arc<RegistryStore>, cors_origin: Option<&str>) -> Result<Router, Error> {
    let origin = match cors_origin {
        None | Some("*") => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o)
                .map_err(|e| Error::InvalidArgument(format!("bad CORS origin `{o}`: {e}")))?,
        ),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Ok(Router::new()
        .route("/health", get(health))
        .route(
            "/experiments",
            get(list_experiments).post(create_experiment),
        )
        .route("/experiments/{id}/posterior", get(get_posterior))
        .route("/decide", post(post_decide))
        .route("/decision-space", post(post_decision_space))
        .fallback(fallback)
        .layer(cors)
        .with_state(AppState { store }))
}

/// Serves the API until the process receives Ctrl-C.
pub async fn serve(
    store: Arc<RegistryStore>,
    addr: SocketAddr,
    cors_origin: Option<&str>,
) -> Result<(), Error> {
    let app = router(store, cors_origin)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
