//! JSON API for the web front end.
//!
//! `POST /api/simulate` runs the same code path as `splitfuzz simulate`, so
//! responses match the CLI files value for value.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use splitfuzz::config::Document;
use splitfuzz::fuzzy::LinguisticVariable;
use splitfuzz::scenario::{compare_methods, run_sweep, Aggregate, Ranking, DEFAULT_SEED};
use splitfuzz::{DefuzzMethod, MetricsReport, RuleBase, Series, SweepConfig};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::args::ServeArgs;
use crate::commands::{load_document, sweep_run_id};
use crate::run::{simulate, FieldError, RunSpec, Severity};
use crate::UsageError;

pub struct AppState {
    pub doc: Document,
    pub rules: RuleBase,
    pub timeout: Duration,
}

impl AppState {
    pub fn new(doc: Document, timeout: Duration) -> Result<Self, String> {
        let rules = doc.rule_base().map_err(|e| e.to_string())?;
        Ok(Self { doc, rules, timeout })
    }
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(Document::default(), Duration::from_secs(120)).expect("default document")
    }
}

/// Request body for `/api/simulate`. Missing fields take the server
/// configuration defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub setpoint: Option<f64>,
    pub initial_pressure: Option<f64>,
    pub total_time: Option<f64>,
    pub dt: Option<f64>,
    pub method: Option<String>,
    pub fuel_gain: Option<f64>,
    pub outlet_gain: Option<f64>,
    pub fuel_flow: Option<f64>,
    pub base_outflow: Option<f64>,
    pub noise: Option<f64>,
    pub delay: Option<f64>,
    pub actuator: Option<bool>,
    pub band: Option<f64>,
    pub show_membership: Option<bool>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateResponse {
    pub run_id: String,
    pub config: RunSpec,
    pub series: Series,
    pub metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<splitfuzz::fuzzy::VariableCurves>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub setpoint: Option<f64>,
    pub ipe_values: Option<Vec<f64>>,
    pub methods: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
    pub total_time: Option<f64>,
    pub dt: Option<f64>,
    pub fuel_gain: Option<f64>,
    pub outlet_gain: Option<f64>,
    pub fuel_flow: Option<f64>,
    pub base_outflow: Option<f64>,
    pub noise: Option<f64>,
    pub delay: Option<f64>,
    pub actuator: Option<bool>,
    pub band: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SweepCell {
    pub method: DefuzzMethod,
    pub ipe: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SweepResponse {
    pub run_id: String,
    pub cell_count: usize,
    pub cells: Vec<SweepCell>,
    pub aggregates: Vec<Aggregate>,
    pub ranking: Ranking,
}

enum ApiError {
    Fields(StatusCode, BTreeMap<String, String>),
    Timeout,
    Internal(String),
}

impl ApiError {
    fn field(status: StatusCode, field: &str, message: impl Into<String>) -> Self {
        ApiError::Fields(status, BTreeMap::from([(field.to_string(), message.into())]))
    }

    fn from_fields(errors: Vec<FieldError>) -> Self {
        let status = if errors.iter().any(|e| e.severity == Severity::Invalid) {
            StatusCode::BAD_REQUEST
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        let map = errors
            .into_iter()
            .filter(|e| status == StatusCode::UNPROCESSABLE_ENTITY || e.severity == Severity::Invalid)
            .map(|e| (e.field.to_string(), e.message))
            .collect();
        ApiError::Fields(status, map)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::Fields(status, errors) => (status, Json(json!({ "errors": errors }))).into_response(),
            ApiError::Timeout => {
                (StatusCode::GATEWAY_TIMEOUT, Json(json!({ "error": "computation exceeded the request timeout" })))
                    .into_response()
            }
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": m }))).into_response(),
        }
    }
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::field(StatusCode::BAD_REQUEST, "body", e.to_string()))
}

fn parse_method(s: &str) -> Result<DefuzzMethod, ApiError> {
    s.parse().map_err(|_| {
        ApiError::field(
            StatusCode::BAD_REQUEST,
            "method",
            format!("unknown method `{s}`; valid methods: {}", DefuzzMethod::names()),
        )
    })
}

/// Applies a request to the server defaults, exactly as CLI flags are applied.
pub fn resolve_simulate(doc: &Document, req: &SimulateRequest) -> Result<RunSpec, Vec<FieldError>> {
    let mut spec = RunSpec::from_document(doc, req.seed.unwrap_or(DEFAULT_SEED));
    let p = &mut spec.plant;
    let pairs = [
        (&mut p.initial_pressure, req.initial_pressure),
        (&mut p.duration, req.total_time),
        (&mut p.dt, req.dt),
        (&mut p.fuel_gain, req.fuel_gain),
        (&mut p.outlet_gain, req.outlet_gain),
        (&mut p.fuel_flow, req.fuel_flow),
        (&mut p.base_outflow, req.base_outflow),
        (&mut p.noise_std, req.noise),
        (&mut p.delay, req.delay),
    ];
    for (dst, v) in pairs {
        if let Some(v) = v {
            *dst = v;
        }
    }
    if let Some(a) = req.actuator {
        p.actuator_dynamics = a;
    }
    if let Some(sp) = req.setpoint {
        spec.setpoint = sp;
    }
    if let Some(b) = req.band {
        spec.band_pct = b;
    }
    let mut errors = Vec::new();
    if let Some(m) = &req.method {
        match m.parse() {
            Ok(m) => spec.method = m,
            Err(_) => errors.push(FieldError::invalid(
                "method",
                format!("unknown method `{m}`; valid methods: {}", DefuzzMethod::names()),
            )),
        }
    }
    errors.extend(spec.validate());
    if errors.is_empty() {
        Ok(spec)
    } else {
        Err(errors)
    }
}

async fn blocking<T: Send + 'static>(timeout: Duration, f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    match tokio::time::timeout(timeout, tokio::task::spawn_blocking(f)).await {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(ApiError::Internal(e.to_string())),
        Err(_) => Err(ApiError::Timeout),
    }
}

async fn simulate_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SimulateResponse>, ApiError> {
    let req: SimulateRequest = parse_body(&body)?;
    let spec = resolve_simulate(&state.doc, &req).map_err(ApiError::from_fields)?;
    let show = req.show_membership.unwrap_or(false);
    let st = state.clone();
    let out = blocking(state.timeout, move || simulate(&spec, &st.rules)).await?.map_err(ApiError::Internal)?;
    let membership = show.then(|| membership_curves(&state.rules));
    Ok(Json(SimulateResponse {
        run_id: out.run_id,
        config: out.spec,
        series: out.series,
        metrics: out.metrics,
        membership,
    }))
}

fn membership_curves(rules: &RuleBase) -> Vec<splitfuzz::fuzzy::VariableCurves> {
    std::iter::once(rules.input()).chain(rules.outputs()).map(LinguisticVariable::curves).collect()
}

async fn membership_handler(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    Json(json!({ "variables": membership_curves(&state.rules) }))
}

async fn methods_handler() -> impl IntoResponse {
    let list: Vec<_> = DefuzzMethod::ALL.iter().map(|m| json!({ "id": m.name(), "title": m.title() })).collect();
    Json(json!({ "methods": list }))
}

fn resolve_sweep(doc: &Document, req: &SweepRequest) -> Result<SweepConfig, ApiError> {
    let mut cfg = SweepConfig {
        setpoint: req.setpoint.unwrap_or(doc.controller.setpoint),
        band_pct: req.band.unwrap_or(doc.controller.band_pct),
        plant: doc.plant,
        seeds: req.seeds.clone().unwrap_or_else(|| vec![DEFAULT_SEED]),
        ..SweepConfig::default()
    };
    if let Some(v) = &req.ipe_values {
        cfg.ipe_values = v.clone();
    }
    if let Some(ms) = &req.methods {
        cfg.methods = ms.iter().map(|m| parse_method(m)).collect::<Result<_, _>>()?;
    }
    let p = &mut cfg.plant;
    for (dst, v) in [
        (&mut p.duration, req.total_time),
        (&mut p.dt, req.dt),
        (&mut p.fuel_gain, req.fuel_gain),
        (&mut p.outlet_gain, req.outlet_gain),
        (&mut p.fuel_flow, req.fuel_flow),
        (&mut p.base_outflow, req.base_outflow),
        (&mut p.noise_std, req.noise),
        (&mut p.delay, req.delay),
    ] {
        if let Some(v) = v {
            *dst = v;
        }
    }
    if let Some(a) = req.actuator {
        p.actuator_dynamics = a;
    }
    if cfg.setpoint == 0.0 {
        return Err(ApiError::field(StatusCode::BAD_REQUEST, "setpoint", "percentage metrics are undefined at 0"));
    }
    if cfg.cell_count() > 20_000 {
        return Err(ApiError::field(StatusCode::BAD_REQUEST, "seeds", "sweep exceeds 20000 cells"));
    }
    cfg.validate().map_err(|e| ApiError::field(StatusCode::BAD_REQUEST, "sweep", e.to_string()))?;
    Ok(cfg)
}

async fn sweep_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SweepResponse>, ApiError> {
    let req: SweepRequest = parse_body(&body)?;
    let cfg = resolve_sweep(&state.doc, &req)?;
    let st = state.clone();
    let report = blocking(state.timeout, move || run_sweep(&cfg, &st.rules))
        .await?
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let ranking = compare_methods(&report);
    let cells = report
        .cells
        .iter()
        .map(|c| SweepCell {
            method: c.method,
            ipe: c.ipe,
            seed: c.seed,
            metrics: c.metrics.clone().ok(),
            error: c.metrics.clone().err(),
        })
        .collect::<Vec<_>>();
    Ok(Json(SweepResponse {
        run_id: sweep_run_id(&report.config, &state.rules),
        cell_count: cells.len(),
        cells,
        aggregates: report.aggregates,
        ranking,
    }))
}

async fn health() -> impl IntoResponse {
    Json(json!({ "status": "ok" }))
}

pub fn router(state: Arc<AppState>, cors_origin: Option<&str>) -> Result<Router, String> {
    let origin = match cors_origin {
        None => AllowOrigin::from(Any),
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o).map_err(|e| format!("cors origin `{o}`: {e}"))?),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers(Any);
    Ok(Router::new()
        .route("/api/health", get(health))
        .route("/api/methods", get(methods_handler))
        .route("/api/membership", get(membership_handler))
        .route("/api/simulate", post(simulate_handler))
        .route("/api/sweep", post(sweep_handler))
        .layer(cors)
        .with_state(state))
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

pub fn serve_blocking(args: &ServeArgs) -> Result<()> {
    let doc = load_document(args.config.as_deref())?;
    let state = AppState::new(doc, Duration::from_secs(args.timeout_secs.max(1))).map_err(UsageError)?;
    let app = router(Arc::new(state), args.cors_origin.as_deref()).map_err(UsageError)?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((args.bind.as_str(), args.port))
            .await
            .with_context(|| format!("binding {}:{}", args.bind, args.port))?;
        let addr: SocketAddr = listener.local_addr()?;
        println!("listening on http://{addr}");
        println!("port {}", addr.port());
        use std::io::Write;
        std::io::stdout().flush()?;
        axum::serve(listener, app).with_graceful_shutdown(shutdown_signal()).await?;
        Ok(())
    })
}
