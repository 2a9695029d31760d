//! HTTP/JSON API.
//!
//! * `GET /api/health` returns `{"status": "ok", "flights": n}`.
//! * `GET /api/flights?origin=CMH&dest=ATL&from=2014-06-01&to=2014-06-22`
//!   returns matching flights (id order) with their polylines.
//! * `POST /api/cluster` takes a [`ClusterRequest`] body and returns a
//!   [`ClusterResponse`](super::ClusterResponse).
//!
//! Errors are `{"error": message, "field": name-or-null}` with a 4xx/5xx
//! status.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use log::info;
use serde_json::json;

use super::cache::MatrixCache;
use super::pipeline::run_cluster;
use super::report::FlightPolyline;
use super::request::{ClusterRequest, FlightsParams};
use super::ServiceError;
use crate::error::Error;
use crate::track::TrackStore;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<TrackStore>,
    pub cache: Arc<MatrixCache>,
}

impl AppState {
    pub fn new(store: TrackStore) -> Self {
        AppState {
            store: Arc::new(store),
            cache: Arc::new(MatrixCache::default()),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/flights", get(flights))
        .route("/api/cluster", post(cluster))
        .with_state(state)
}

pub async fn serve(state: AppState, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, field) = match &self {
            ServiceError::Validation { field, .. } => {
                (StatusCode::BAD_REQUEST, Some(field.clone()))
            }
            ServiceError::NoFlights(_) => (StatusCode::UNPROCESSABLE_ENTITY, None),
            ServiceError::Core(Error::TooFewFlights(_))
            | ServiceError::Core(Error::InsufficientPoints { .. })
            | ServiceError::Core(Error::DegenerateTrack { .. })
            | ServiceError::Core(Error::MissingAirport(_)) => {
                (StatusCode::UNPROCESSABLE_ENTITY, None)
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, None),
        };
        let body = json!({ "error": self.to_string(), "field": field });
        (status, Json(body)).into_response()
    }
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "flights": state.store.len() }))
}

async fn flights(
    State(state): State<AppState>,
    Query(params): Query<FlightsParams>,
) -> Result<Json<Vec<FlightPolyline>>, ServiceError> {
    let query = params.to_query()?;
    Ok(Json(
        state
            .store
            .query(&query)
            .into_iter()
            .map(|t| FlightPolyline::new(t, None))
            .collect(),
    ))
}

async fn cluster(State(state): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let req = ClusterRequest::from_json(&body)?;
    let response =
        tokio::task::spawn_blocking(move || run_cluster(&state.store, &req, Some(&state.cache)))
            .await
            .map_err(|e| ServiceError::Core(Error::Domain(format!("worker failed: {e}"))))??;
    Ok(Json(response).into_response())
}
