//! Drives the HTTP API in-process: register experiments, then query posterior, decision and
//! decision-space endpoints exactly as a browser front end would.
//!
//! `cargo run -p launch-decision-service --example serve_and_query -- --listen 127.0.0.1:8080`
//! serves the same seeded registry on a real socket instead.

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use launch_decision::registry::{Registry, RegistryStore};
use launch_decision_service::router;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (u16, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let body = body
        .map(|v| Body::from(v.to_string()))
        .unwrap_or_else(Body::empty);
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

fn record(id: &str, t: i64, x: [f64; 2]) -> Value {
    json!({
        "id": id, "timestamp": t, "metrics": ["revenue", "latency"],
        "x": x, "sigma": [[4.0, 1.0], [1.0, 9.0]],
        "treatment_label": null, "provenance": "supplied"
    })
}

#[tokio::main]
async fn main() {
    let store = Arc::new(RegistryStore::in_memory(Registry::new()));
    let app = router(store, None).unwrap();

    for (i, x) in [[2.0, -1.0], [5.0, 3.0], [3.0, 0.5], [-1.0, 2.0], [4.0, 1.0]]
        .iter()
        .enumerate()
    {
        let (status, body) = call(
            &app,
            "POST",
            "/experiments",
            Some(record(&format!("E{}", i + 1), i as i64, *x)),
        )
        .await;
        print!("POST /experiments -> {status} {body}");
    }

    let (status, body) = call(&app, "GET", "/experiments/E5/posterior?k=1", None).await;
    println!("\nGET /experiments/E5/posterior?k=1 -> {status}\n{body}");

    let decide =
        json!({ "experiment": "E5", "k": 1, "tradeoffs": [1.0, -2.0], "c0": 0.0, "c1": 1.0 });
    let (status, body) = call(&app, "POST", "/decide", Some(decide)).await;
    println!("POST /decide -> {status}\n{body}");

    let space = json!({
        "experiment": "E5", "k": 1,
        "axis1": { "metric": "revenue", "values": [0.5, 1.0, 2.0] },
        "axis2": { "metric": "latency", "values": [-4.0, -1.0, 1.0, 4.0] },
    });
    let (status, body) = call(&app, "POST", "/decision-space", Some(space)).await;
    let v: Value = serde_json::from_str(&body).unwrap();
    println!(
        "POST /decision-space -> {status}: {} x {} grid",
        v["rows"], v["cols"]
    );
    for cell in v["grid"].as_array().unwrap() {
        println!(
            "  lambda = ({}, {})  {}",
            cell["lambda1"], cell["lambda2"], cell["decision"]
        );
    }

    let (status, body) = call(
        &app,
        "POST",
        "/experiments",
        Some(record("E1", 9, [0.0, 0.0])),
    )
    .await;
    print!("\nduplicate POST /experiments -> {status} {body}");
    let (status, body) = call(&app, "GET", "/experiments/nope/posterior", None).await;
    print!("GET /experiments/nope/posterior -> {status} {body}");

    let mut args = std::env::args().skip(1);
    if let (Some(flag), Some(addr)) = (args.next(), args.next()) {
        if flag == "--listen" {
            let listener = tokio::net::TcpListener::bind(&addr).await.unwrap();
            println!("\nlistening on http://{addr} (Ctrl-C to stop)");
            axum::serve(listener, app).await.unwrap();
        }
    }
}
