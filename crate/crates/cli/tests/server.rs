//! The HTTP routes, driven in-process.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use fluence::{build_document, server::router, RunConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(text: &str, inputs: &[&str]) -> Router {
    let dir = tempfile::tempdir().unwrap();
    let entry = dir.path().join("main.fld");
    std::fs::write(&entry, text).unwrap();
    let cfg = RunConfig { entry, inputs: inputs.iter().map(|s| s.to_string()).collect(), port: 0, out: None };
    router(build_document(&cfg).unwrap())
}

async fn call(app: &Router, req: Request<Body>) -> (StatusCode, String) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn post(body: &str) -> Request<Body> {
    Request::post("/select").header("content-type", "application/json").body(Body::from(body.to_string())).unwrap()
}

const PROGRAM: &str = "def xs = [3, 4]\ndef total = @doc(p\"both\") sum(xs)\n[total, 10]\n";

#[tokio::test]
async fn health_and_document() {
    let app = app(PROGRAM, &["xs"]);
    assert_eq!(call(&app, Request::get("/health").body(Body::empty()).unwrap()).await, (StatusCode::OK, "ok".into()));
    let (status, body) = call(&app, Request::get("/document").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let doc: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["intermediates"].as_array().unwrap().len(), 1);
    assert_eq!(doc["graph"]["vertices"].as_array().unwrap().len(), doc["graph"]["vertices"].as_array().unwrap().last().unwrap()["id"].as_u64().unwrap() as usize + 1);
}

#[tokio::test]
async fn selecting_the_total_reaches_the_inputs() {
    let app = app(PROGRAM, &["xs"]);
    let (_, body) = call(&app, Request::get("/document").body(Body::empty()).unwrap()).await;
    let doc: Value = serde_json::from_str(&body).unwrap();
    let total = doc["intermediates"][0]["vertexId"].as_u64().unwrap();

    let req = json!({"roots": [total], "direction": "upstream"}).to_string();
    let (status, first) = call(&app, post(&req)).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    let r: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(r["intermediates"].as_array().unwrap().len(), 1);
    // Both list elements, and every highlight is persistent by default.
    assert!(r["inputs"].as_array().unwrap().len() >= 2);
    assert!(r["highlights"].as_object().unwrap().values().all(|s| s == "persistent"));

    let (_, second) = call(&app, post(&req)).await;
    assert_eq!(first, second);

    let transient = json!({"roots": [total], "direction": "downstream", "mode": "transient"}).to_string();
    let (status, body) = call(&app, post(&transient)).await;
    assert_eq!(status, StatusCode::OK);
    let r: Value = serde_json::from_str(&body).unwrap();
    assert!(r["highlights"].as_object().unwrap().values().all(|s| s == "transient"));
    assert!(!r["outputs"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let app = app(PROGRAM, &["xs"]);
    let (status, body) = call(&app, post(r#"{"roots": [999999], "direction": "upstream"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(serde_json::from_str::<Value>(&body).unwrap()["error"].is_string());

    let (status, _) = call(&app, post(r#"{"roots": [0], "direction": "sideways"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, post("not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = call(&app, Request::get("/nowhere").body(Body::empty()).unwrap()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
