use std::fs;
use std::process::Command;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use splitfuzz::io::fmt6;
use splitfuzz_cli::service::{router, AppState};
use tempfile::TempDir;
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(AppState::default()), None).unwrap()
}

async fn send(app: Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value, bytes)
}

async fn post(body: Value) -> (StatusCode, Value) {
    let (s, v, _) = send(app(), "POST", "/api/simulate", Some(body)).await;
    (s, v)
}

fn f64s(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[tokio::test]
async fn methods_lists_five_entries() {
    let (status, v, _) = send(app(), "GET", "/api/methods", None).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = v["methods"].as_array().unwrap().iter().map(|m| m["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["lom", "som", "mom", "bisector", "centroid"]);
}

#[tokio::test]
async fn membership_curves_match_the_partition() {
    let (status, v, _) = send(app(), "GET", "/api/membership", None).await;
    assert_eq!(status, StatusCode::OK);
    let vars = v["variables"].as_array().unwrap();
    assert_eq!(vars.len(), 3);
    let centers = [[-5.0, -2.5, 0.0, 2.5, 5.0], [0.0, 25.0, 50.0, 75.0, 100.0], [0.0, 25.0, 50.0, 75.0, 100.0]];
    for (var, centers) in vars.iter().zip(centers) {
        let x = f64s(&var["x"]);
        let terms = var["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 5);
        for (term, center) in terms.iter().zip(centers) {
            let mu = f64s(&term["degrees"]);
            assert_eq!(mu.len(), x.len());
            assert!(mu.iter().all(|m| (0.0..=1.0).contains(m)));
            let peak = mu.iter().position(|&m| m == 1.0).unwrap();
            assert!((x[peak] - center).abs() < 1e-9, "{} peak at {}", term["label"], x[peak]);
        }
    }
}

#[tokio::test]
async fn far_start_scenario_settles() {
    let (status, v) = post(json!({ "setpoint": 5.0, "initial_pressure": 9.53, "method": "centroid" })).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let settle = v["metrics"]["settling_time"].as_f64().unwrap();
    assert!(settle <= 15.0, "{settle}");
    let s = &v["series"];
    let n = f64s(&s["t"]).len();
    for col in ["pressure", "fuel_cmd", "outlet_cmd", "fuel_eff", "outlet_eff"] {
        assert_eq!(f64s(&s[col]).len(), n, "{col}");
    }
    assert!(v.get("membership").is_none());
}

#[tokio::test]
async fn membership_is_attached_on_request() {
    let (status, v) = post(json!({ "show_membership": true })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["membership"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn invalid_fields_are_bad_requests() {
    for (body, field) in [
        (json!({ "setpoint": 0.0 }), "setpoint"),
        (json!({ "setpoint": 11.0 }), "setpoint"),
        (json!({ "noise": -1.0 }), "noise"),
        (json!({ "method": "median" }), "method"),
        (json!({ "dt": 0.0 }), "dt"),
        (json!({ "band": 3.0 }), "band"),
        (json!({ "total_time": -5.0 }), "total_time"),
        (json!({ "fuel_gain": -1.0 }), "fuel_gain"),
        (json!({ "temperature": 20.0 }), "body"),
        (json!({ "setpoint": "five" }), "body"),
    ] {
        let (status, v) = post(body.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert!(v["errors"][field].is_string(), "{body} -> {v}");
    }
}

#[tokio::test]
async fn malformed_json_is_a_bad_request() {
    let req = Request::builder().method("POST").uri("/api/simulate").body(Body::from("{not json")).unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn infeasible_physics_is_unprocessable() {
    let (status, v) = post(json!({ "initial_pressure": 12.0 })).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["errors"]["initial_pressure"].is_string());

    // Malformed input outranks infeasibility.
    let (status, v) = post(json!({ "initial_pressure": 12.0, "setpoint": 0.0 })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["errors"]["setpoint"].is_string());
}

#[tokio::test]
async fn identical_requests_give_identical_bodies() {
    let body = json!({ "initial_pressure": 2.0, "method": "mom", "seed": 11, "actuator": true });
    let a = send(app(), "POST", "/api/simulate", Some(body.clone())).await.2;
    let b = send(app(), "POST", "/api/simulate", Some(body.clone())).await.2;
    assert_eq!(a, b);

    let shared = app();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let (app, body) = (shared.clone(), body.clone());
            tokio::spawn(async move { send(app, "POST", "/api/simulate", Some(body)).await.2 })
        })
        .collect();
    for h in handles {
        assert_eq!(h.await.unwrap(), a);
    }
}

#[tokio::test]
async fn default_sweep_has_105_cells() {
    let (status, v, _) = send(app(), "POST", "/api/sweep", Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["cells"].as_array().unwrap().len(), 105);
    assert_eq!(v["cell_count"], 105);
    assert_eq!(v["ranking"]["best"]["sse"], "centroid");
}

#[tokio::test]
async fn single_method_sweep_has_21_cells() {
    let (status, v, _) = send(app(), "POST", "/api/sweep", Some(json!({ "methods": ["bisector"] }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["cells"].as_array().unwrap().len(), 21);
    assert_eq!(v["ranking"]["methods"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn bad_sweeps_are_rejected() {
    for body in [json!({ "methods": ["median"] }), json!({ "setpoint": 0.0 }), json!({ "ipe_values": [] })] {
        let (status, _, _) = send(app(), "POST", "/api/sweep", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
    }
}

#[tokio::test]
async fn cors_allows_cross_origin_calls() {
    let req = Request::builder()
        .method("GET")
        .uri("/api/methods")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));

    let pinned = router(Arc::new(AppState::default()), Some("http://ui.example")).unwrap();
    let req = Request::builder()
        .method("GET")
        .uri("/api/methods")
        .header("origin", "http://elsewhere.example")
        .body(Body::empty())
        .unwrap();
    let resp = pinned.oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://ui.example");
}

/// The API series must match the CLI files at the files' precision.
#[tokio::test]
async fn api_matches_cli_files() {
    let cases = [
        (vec!["--initial", "9.53", "--method", "centroid"], json!({ "initial_pressure": 9.53, "method": "centroid" })),
        (
            vec!["--initial", "1.5", "--method", "som", "--seed", "3", "--actuator", "on", "--noise", "0.01"],
            json!({ "initial_pressure": 1.5, "method": "som", "seed": 3, "actuator": true, "noise": 0.01 }),
        ),
    ];
    for (flags, body) in cases {
        let dir = TempDir::new().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_splitfuzz"))
            .arg("simulate")
            .args(&flags)
            .arg("--no-plot")
            .arg("--out")
            .arg(dir.path())
            .env_remove(splitfuzz_cli::OUT_DIR_ENV)
            .output()
            .unwrap();
        assert!(out.status.success());
        let paths: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();

        let (status, v) = post(body).await;
        assert_eq!(status, StatusCode::OK);
        let id = v["run_id"].as_str().unwrap();
        assert!(paths[0].contains(id), "{} vs {id}", paths[0]);

        let s = &v["series"];
        let sp = s["setpoint"].as_f64().unwrap();
        let cols: Vec<Vec<f64>> = ["t", "pressure", "fuel_cmd", "outlet_cmd", "fuel_eff", "outlet_eff"]
            .iter()
            .map(|c| f64s(&s[*c]))
            .collect();
        let csv = fs::read_to_string(&paths[0]).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), cols[0].len());
        for (k, row) in rows.iter().enumerate() {
            let expected = [cols[0][k], sp, cols[1][k], cols[2][k], cols[3][k], cols[4][k], cols[5][k]]
                .map(fmt6)
                .join(",");
            assert_eq!(*row, expected, "row {k}");
        }

        let metrics = fs::read_to_string(&paths[1]).unwrap();
        let fields: Vec<&str> = metrics.lines().nth(1).unwrap().split(',').collect();
        let m = &v["metrics"];
        for (i, key) in ["mse", "rmse", "mae", "iae", "ise", "itae", "sse"].iter().enumerate() {
            assert_eq!(fields[i + 1], fmt6(m[*key].as_f64().unwrap()), "{key}");
        }
        let opt = |key: &str| m[key].as_f64().map(fmt6).unwrap_or_default();
        assert_eq!(fields[8], opt("rise_time"));
        assert_eq!(fields[9], opt("fall_time"));
        assert_eq!(fields[10], opt("settling_time"));
        assert_eq!(fields[11], fmt6(m["over_under_pct"].as_f64().unwrap()));
    }
}
