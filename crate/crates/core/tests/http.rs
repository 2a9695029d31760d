use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use flightclust::hcluster::{cut_threshold, Dendrogram};
use flightclust::service::http::{router, AppState};
use flightclust::synthgen::{generate, scenario_airports, ScenarioKind, ScenarioSpec};
use flightclust::track::TrackStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn store_with(kinds: &[(ScenarioKind, Option<usize>)]) -> TrackStore {
    let mut store = TrackStore::new();
    for a in scenario_airports() {
        store.add_airport(a);
    }
    for &(kind, per_group) in kinds {
        let mut spec = ScenarioSpec::new(kind);
        if let Some(n) = per_group {
            spec.flights_per_group = n;
        }
        store.extend(generate(&spec).unwrap().flights).unwrap();
    }
    store
}

fn app(store: TrackStore) -> Router {
    router(AppState::new(store))
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, body: &Value) -> (StatusCode, Value) {
    let req = Request::post("/api/cluster")
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

fn cluster_body(
    origin: &str,
    dest: &str,
    from: &str,
    to: &str,
    metric: &str,
    mode: Value,
) -> Value {
    json!({
        "query": {"origin": origin, "destination": dest, "date_from": from, "date_to": to},
        "metric": metric,
        "extraction_n": 1,
        "linkage": "average",
        "mode": mode,
    })
}

fn two_bundles(mode: Value) -> Value {
    cluster_body("CMH", "ATL", "2014-06-01", "2014-06-22", "geo", mode)
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[tokio::test]
async fn health_reports_flight_count() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, Some(3))]));
    let (status, body) = get(&app, "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({"status": "ok", "flights": 6}));
}

#[tokio::test]
async fn flights_on_empty_store_is_empty_array() {
    let app = app(TrackStore::new());
    let (status, body) = get(
        &app,
        "/api/flights?origin=CMH&dest=ATL&from=2014-06-01&to=2014-06-22",
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([]));
}

#[tokio::test]
async fn flights_rejects_reversed_dates() {
    let app = app(TrackStore::new());
    let (status, body) = get(
        &app,
        "/api/flights?origin=CMH&dest=ATL&from=2014-06-22&to=2014-06-01",
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let field = body["field"].as_str().unwrap();
    assert!(field.contains("from") && field.contains("to"), "{body}");
}

#[tokio::test]
async fn flights_rejects_malformed_date() {
    let app = app(TrackStore::new());
    let (status, body) = get(
        &app,
        "/api/flights?origin=CMH&dest=ATL&from=06/01/2014&to=2014-06-22",
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["field"], "from");
}

#[tokio::test]
async fn flights_returns_matches_in_id_order() {
    let app = app(store_with(&[
        (ScenarioKind::TwoBundles, Some(2)),
        (ScenarioKind::ParallelCorridors, Some(2)),
    ]));
    let (status, body) = get(
        &app,
        "/api/flights?origin=CMH&dest=ATL&from=2014-06-01&to=2014-06-22",
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let list = body.as_array().unwrap();
    assert_eq!(list.len(), 4);
    let ids: Vec<&str> = list
        .iter()
        .map(|f| f["flight_id"].as_str().unwrap())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for f in list {
        assert_eq!(f["n_points"], 120);
        assert!(!f["coordinates"].as_array().unwrap().is_empty());
    }
}

#[tokio::test]
async fn auto_mode_on_two_bundles() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, None)]));
    let (status, body) = post(&app, &two_bundles(json!({"type": "auto"}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["k"], 2);
    assert_eq!(body["clusters"].as_array().unwrap().len(), 2);
    assert!(body["silhouette"]["score"].as_f64().unwrap() > 0.7);
    assert_eq!(body["stats"].as_array().unwrap().len(), 2);
    assert!(body["timing"]["matrix_ms"].is_number());
}

#[tokio::test]
async fn threshold_above_root_gives_one_cluster_without_silhouette() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, None)]));
    let (_, auto) = post(&app, &two_bundles(json!({"type": "auto"}))).await;
    let merges = auto["dendrogram"]["merges"].as_array().unwrap();
    let root = merges.last().unwrap()[2].as_f64().unwrap();

    let (status, body) = post(
        &app,
        &two_bundles(json!({"type": "threshold", "t": root + 1.0})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["k"], 1);
    assert!(body["silhouette"].is_null());
    let stats = body["stats"].as_array().unwrap();
    assert_eq!(stats.len(), 1);
    assert_eq!(stats[0]["number_of_flights"], 40);
    assert!(auto["timing"]["matrix_cached"] == false && body["timing"]["matrix_cached"] == true);
}

#[tokio::test]
async fn cosine_threshold_out_of_range_is_rejected() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, Some(3))]));
    let body = cluster_body(
        "CMH",
        "ATL",
        "2014-06-01",
        "2014-06-22",
        "cosine",
        json!({"type": "threshold", "t": 50.0}),
    );
    let (status, resp) = post(&app, &body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(resp["field"], "mode.t");
}

#[tokio::test]
async fn malformed_body_names_field() {
    let app = app(TrackStore::new());
    let mut body = two_bundles(json!({"type": "auto"}));
    body["extraction_n"] = json!(0);
    let (status, resp) = post(&app, &body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(resp["field"], "extraction_n");

    let mut body = two_bundles(json!({"type": "auto"}));
    body["metric"] = json!("manhattan");
    let (status, resp) = post(&app, &body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(resp["field"], "metric");
}

#[tokio::test]
async fn empty_query_is_unprocessable() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, Some(3))]));
    let body = cluster_body(
        "CMH",
        "ATL",
        "2015-01-01",
        "2015-01-31",
        "geo",
        json!({"type": "auto"}),
    );
    let (status, resp) = post(&app, &body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(resp["error"]
        .as_str()
        .unwrap()
        .contains("no flights matched"));
}

#[tokio::test]
async fn auto_mode_needs_three_flights() {
    let app = app(store_with(&[(ScenarioKind::TwoBundles, Some(2))]));
    let body = cluster_body(
        "CMH",
        "ATL",
        "2014-06-01",
        "2014-06-02",
        "geo",
        json!({"type": "auto"}),
    );
    let (status, _) = post(&app, &body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn repeated_requests_are_identical() {
    let app = app(store_with(&[(ScenarioKind::ParallelCorridors, Some(6))]));
    let body = cluster_body(
        "SFO",
        "PIT",
        "2014-07-19",
        "2014-08-12",
        "geo",
        json!({"type": "k", "k": 3}),
    );
    let (_, first) = post(&app, &body).await;
    let (_, second) = post(&app, &body).await;
    assert_eq!(first["k"], 3);
    assert_eq!(strip_timing(first), strip_timing(second));
}

#[tokio::test]
async fn threshold_cuts_agree_with_local_recut() {
    let app = app(store_with(&[(ScenarioKind::ParallelCorridors, Some(6))]));
    let query = |mode| cluster_body("SFO", "PIT", "2014-07-19", "2014-08-12", "geo", mode);
    let (_, auto) = post(&app, &query(json!({"type": "auto"}))).await;
    let dendrogram: Dendrogram = serde_json::from_value(auto["dendrogram"].clone()).unwrap();
    let leaf_ids: Vec<String> = serde_json::from_value(auto["leaf_ids"].clone()).unwrap();
    let root = dendrogram.root_height().unwrap();

    let mut counts = Vec::new();
    for step in 0..20 {
        let t = root * 1.1 * step as f64 / 19.0;
        let (status, body) = post(&app, &query(json!({"type": "threshold", "t": t}))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        let local = cut_threshold(&dendrogram, t);
        let members = local.members();
        let server = body["clusters"].as_array().unwrap();
        assert_eq!(server.len(), members.len(), "t = {t}");
        for (cluster, ids) in server.iter().zip(&members) {
            let expected: Vec<&str> = ids.iter().map(|&i| leaf_ids[i].as_str()).collect();
            let got: Vec<&str> = cluster["flight_ids"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap())
                .collect();
            assert_eq!(got, expected, "t = {t}");
        }
        counts.push(local.k());
    }
    assert!(counts.windows(2).all(|w| w[1] <= w[0]));
    assert!(counts.contains(&3) && counts.contains(&2));
}

#[tokio::test]
async fn geo_thresholds_50_and_80_on_parallel_corridors() {
    let app = app(store_with(&[(ScenarioKind::ParallelCorridors, None)]));
    let query = |t: f64| {
        cluster_body(
            "SFO",
            "PIT",
            "2014-07-19",
            "2014-08-12",
            "geo",
            json!({"type": "threshold", "t": t}),
        )
    };
    let (_, at80) = post(&app, &query(80.0)).await;
    let (_, at50) = post(&app, &query(50.0)).await;
    assert_eq!(at80["k"], 2);
    assert_eq!(at50["k"], 3);
}
