//! HTTP access to one evaluated document. The graph and views are frozen at
//! startup; every request is answered from them alone, so the server keeps
//! no per-client state.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fluence_core::document::{Document, SelectResponse};
use fluence_core::graph::roles::Selection;
use serde::Serialize;

struct AppState {
    doc: Document,
    /// The bundle, serialized once.
    bundle: String,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn bad_request(message: String) -> Response {
    (StatusCode::BAD_REQUEST, Json(ErrorBody { error: message })).into_response()
}

pub fn router(doc: Document) -> Router {
    let bundle = doc.to_json();
    let state = Arc::new(AppState { doc, bundle });
    Router::new()
        .route("/health", get(health))
        .route("/document", get(document))
        .route("/select", post(select))
        .with_state(state)
}

async fn health() -> &'static str {
    "ok"
}

async fn document(State(state): State<Arc<AppState>>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], state.bundle.clone()).into_response()
}

async fn select(
    State(state): State<Arc<AppState>>,
    body: Result<Json<Selection>, JsonRejection>,
) -> Result<Json<SelectResponse>, Response> {
    let Json(sel) = body.map_err(|e| bad_request(e.body_text()))?;
    state.doc.select(&sel).map(Json).map_err(|e| bad_request(e.to_string()))
}

/// Serves until the process is stopped.
pub async fn serve(doc: Document, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, router(doc)).await
}
