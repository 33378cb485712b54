//! Read-only HTTP API over a scored store.
//!
//! The service holds an immutable [`Snapshot`] of the store. Band math is
//! recomputed per request through the same `report::analyze` call the CLI
//! uses, so both interfaces return identical values for identical
//! parameters.

mod payload;
mod snapshot;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use airsent_core::report::{analyze, Report, ReportParams};
use airsent_core::series::SeriesConfig;
use airsent_core::wordfreq::keyword_search;
use airsent_core::{Airline, Error, Normalizer, Store};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::NaiveDate;
use serde::Deserialize;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub use payload::*;
pub use snapshot::Snapshot;

pub const DEFAULT_PAGE_SIZE: usize = 50;
pub const MAX_PAGE_SIZE: usize = 500;

/// Analysis defaults applied when a request leaves a parameter out.
#[derive(Debug, Clone)]
pub struct ServiceDefaults {
    pub series: SeriesConfig,
    pub top_k: usize,
    pub padding: u64,
}

impl Default for ServiceDefaults {
    fn default() -> Self {
        ServiceDefaults {
            series: SeriesConfig::default(),
            top_k: 5,
            padding: 0,
        }
    }
}

pub struct AppState {
    store: Store,
    normalizer: Normalizer,
    defaults: ServiceDefaults,
    snapshot: RwLock<Option<Arc<Snapshot>>>,
}

impl AppState {
    /// No snapshot is loaded until [`AppState::refresh`] runs.
    pub fn new(store: Store, normalizer: Normalizer, defaults: ServiceDefaults) -> Self {
        AppState {
            store,
            normalizer,
            defaults,
            snapshot: RwLock::new(None),
        }
    }

    pub fn refresh(&self) -> airsent_core::Result<Arc<Snapshot>> {
        let snap = Arc::new(Snapshot::load(&self.store)?);
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Some(snap.clone());
        Ok(snap)
    }

    pub fn snapshot(&self) -> Option<Arc<Snapshot>> {
        self.snapshot.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NoData(_) => StatusCode::NOT_FOUND,
            Error::Locked(_) => StatusCode::SERVICE_UNAVAILABLE,
            e if e.is_input_error() => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let doc = ErrorDoc {
            schema_version: SCHEMA_VERSION,
            status: self.status.as_u16(),
            error: self.message,
        };
        (self.status, Json(doc)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/airlines", get(airlines))
        .route("/api/series/{airline}", get(series))
        .route("/api/breakouts/{airline}", get(breakouts))
        .route("/api/search/{airline}", get(search))
        .route("/api/refresh", post(refresh))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// Loads the first snapshot, binds and serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let loader = state.clone();
    tokio::task::spawn_blocking(move || loader.refresh())
        .await
        .map_err(std::io::Error::other)?
        .map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn current(state: &AppState) -> Result<Arc<Snapshot>, ApiError> {
    state
        .snapshot()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "snapshot not loaded"))
}

fn parse_airline(raw: &str) -> Result<Airline, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, format!("unknown airline {raw:?}")))
}

fn parse_opt<T: std::str::FromStr>(name: &str, raw: &Option<String>) -> Result<Option<T>, ApiError> {
    match raw.as_deref() {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| ApiError::unprocessable(format!("invalid {name}: {s:?}"))),
    }
}

async fn airlines(State(state): State<Arc<AppState>>) -> ApiResult<AirlinesDoc> {
    let snap = current(&state)?;
    Ok(Json(airlines_doc(&snap)))
}

fn airlines_doc(snap: &Snapshot) -> AirlinesDoc {
    AirlinesDoc {
        schema_version: SCHEMA_VERSION,
        loaded_at: snap.loaded_at,
        airlines: snap
            .summaries
            .iter()
            .map(|s| AirlineEntry {
                airline: s.airline,
                name: s.airline.display_name().into(),
                records: s.records,
                scored: s.scored,
                first_date: s.first_date,
                last_date: s.last_date,
            })
            .collect(),
    }
}

async fn refresh(State(state): State<Arc<AppState>>) -> ApiResult<AirlinesDoc> {
    let snap = tokio::task::spawn_blocking(move || state.refresh())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(airlines_doc(&snap)))
}

/// Raw strings so malformed numbers become 422 documents rather than the
/// extractor's plain-text rejection.
#[derive(Debug, Default, Deserialize)]
pub struct BandQuery {
    window: Option<String>,
    k: Option<String>,
    from: Option<String>,
    to: Option<String>,
}

fn run_report(state: &AppState, airline: &str, q: &BandQuery) -> Result<Report, ApiError> {
    let snap = current(state)?;
    let airline = parse_airline(airline)?;
    let window: Option<usize> = parse_opt("window", &q.window)?;
    let k: Option<f64> = parse_opt("k", &q.k)?;
    let from: Option<NaiveDate> = parse_opt("from", &q.from)?;
    let to: Option<NaiveDate> = parse_opt("to", &q.to)?;

    let mut series = state.defaults.series.clone();
    if let Some(w) = window {
        if w == 0 {
            return Err(ApiError::unprocessable("window must be at least 1"));
        }
        series.window = w;
    }
    if let Some(k) = k {
        if !(k > 0.0 && k.is_finite()) {
            return Err(ApiError::unprocessable(format!("k must be positive, got {k}")));
        }
        series.multiplier = k;
    }
    if let (Some(f), Some(t)) = (from, to) {
        if f > t {
            return Err(ApiError::unprocessable(format!("from {f} is after to {t}")));
        }
    }
    let records = snap.records(airline).unwrap_or_default();
    let (first, last) = snap
        .coverage(airline)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no data for {airline}")))?;
    let params = ReportParams {
        airline,
        from: from.unwrap_or(first),
        to: to.unwrap_or(last),
        series,
        top_k: state.defaults.top_k,
        padding: state.defaults.padding,
    };
    Ok(analyze(records, &state.normalizer, &params)?)
}

async fn series(
    State(state): State<Arc<AppState>>,
    Path(airline): Path<String>,
    Query(q): Query<BandQuery>,
) -> ApiResult<SeriesDoc> {
    Ok(Json(series_doc(&run_report(&state, &airline, &q)?)))
}

pub fn series_doc(report: &Report) -> SeriesDoc {
    let p = &report.params;
    SeriesDoc {
        schema_version: SCHEMA_VERSION,
        airline: p.airline,
        window: p.series.window,
        k: p.series.multiplier,
        from: p.from,
        to: p.to,
        mean: report.mean,
        std: report.std,
        constant: report.constant,
        rows: report.rows.clone(),
    }
}

async fn breakouts(
    State(state): State<Arc<AppState>>,
    Path(airline): Path<String>,
    Query(q): Query<BandQuery>,
) -> ApiResult<BreakoutsDoc> {
    Ok(Json(breakouts_doc(&run_report(&state, &airline, &q)?)))
}

pub fn breakouts_doc(report: &Report) -> BreakoutsDoc {
    let p = &report.params;
    let breakouts = report
        .breakouts
        .iter()
        .map(|b| {
            let episode = report.attributions.iter().find(|a| a.start <= b.date && b.date <= a.end);
            BreakoutEntry {
                date: b.date,
                direction: b.direction,
                z_value: b.z_value,
                band_value: b.band_value,
                gap: b.gap,
                episode_start: episode.map_or(b.date, |a| a.start),
                episode_end: episode.map_or(b.date, |a| a.end),
                top_words: episode
                    .map(|a| {
                        a.words
                            .entries
                            .iter()
                            .map(|(word, frequency)| WordCount {
                                word: word.clone(),
                                frequency: *frequency,
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            }
        })
        .collect();
    BreakoutsDoc {
        schema_version: SCHEMA_VERSION,
        airline: p.airline,
        window: p.series.window,
        k: p.series.multiplier,
        from: p.from,
        to: p.to,
        breakouts,
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct SearchQuery {
    q: Option<String>,
    from: Option<String>,
    to: Option<String>,
    cursor: Option<String>,
    limit: Option<String>,
}

async fn search(
    State(state): State<Arc<AppState>>,
    Path(airline): Path<String>,
    Query(q): Query<SearchQuery>,
) -> ApiResult<SearchDoc> {
    let snap = current(&state)?;
    let airline = parse_airline(&airline)?;
    let from: Option<NaiveDate> = parse_opt("from", &q.from)?;
    let to: Option<NaiveDate> = parse_opt("to", &q.to)?;
    let offset: usize = parse_opt("cursor", &q.cursor)?.unwrap_or(0);
    let limit: usize = parse_opt("limit", &q.limit)?.unwrap_or(DEFAULT_PAGE_SIZE);
    if !(1..=MAX_PAGE_SIZE).contains(&limit) {
        return Err(ApiError::unprocessable(format!("limit must be between 1 and {MAX_PAGE_SIZE}")));
    }
    if let (Some(f), Some(t)) = (from, to) {
        if f > t {
            return Err(ApiError::unprocessable(format!("from {f} is after to {t}")));
        }
    }
    let empty = |q| SearchDoc {
        schema_version: SCHEMA_VERSION,
        airline,
        q,
        total: 0,
        results: Vec::new(),
        next_cursor: None,
    };
    let Some(keyword) = q.q else {
        return Ok(Json(empty(None)));
    };
    if keyword.trim().is_empty() {
        return Err(ApiError::unprocessable("q must not be empty"));
    }
    let Some(records) = snap.records(airline) else {
        return Ok(Json(empty(Some(keyword))));
    };
    let in_range: Vec<_> = records
        .iter()
        .filter(|r| from.is_none_or(|f| r.date() >= f) && to.is_none_or(|t| r.date() <= t))
        .cloned()
        .collect();
    let hits = keyword_search(&in_range, &state.normalizer, &keyword)?;
    if offset > hits.len() {
        return Err(ApiError::unprocessable(format!("cursor {offset} is past the end")));
    }
    let end = (offset + limit).min(hits.len());
    Ok(Json(SearchDoc {
        schema_version: SCHEMA_VERSION,
        airline,
        q: Some(keyword),
        total: hits.len(),
        results: hits[offset..end]
            .iter()
            .map(|r| SearchHit {
                tweet_id: r.tweet_id.clone(),
                created_at: r.created_at,
                text: r.text.clone(),
                p_positive: r.p_positive,
                p_negative: r.p_negative,
            })
            .collect(),
        next_cursor: (end < hits.len()).then(|| end.to_string()),
    }))
}
