use std::path::{Path, PathBuf};
use std::sync::Arc;

use airsent_core::corpus::parse_query;
use airsent_core::report::{analyze, ReportParams};
use airsent_core::synth::{scripted_anomalies, FIXTURE_AIRLINES};
use airsent_core::{Airline, Normalizer, Store};
use airsent_service::{
    breakouts_doc, router, series_doc, AirlinesDoc, AppState, BreakoutsDoc, ErrorDoc, SearchDoc, SeriesDoc,
    ServiceDefaults,
};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

const POSITIVE: &[&str] = &["thank", "great", "love", "amazing", "best", "excellent", "awesome", "friendly", "wonderful"];

/// Deterministic stand-in for the trained model.
fn keyword_scorer(text: &str) -> (f64, f64) {
    if POSITIVE.iter().any(|w| text.contains(w)) {
        (0.9, 0.09999999999999998)
    } else {
        (0.2, 0.8)
    }
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn ingest_jsonl(store: &Store, airline: Airline, path: &Path) {
    let query = parse_query(&airline.default_query()).unwrap();
    store.ingest_path(path, airline, &query).unwrap();
    store
        .score_unscored(airline, None, None, |r| Ok(keyword_scorer(&r.text)))
        .unwrap();
}

fn fixture_store(dir: &Path) -> Store {
    let store = Store::open(dir.join("store")).unwrap();
    for airline in FIXTURE_AIRLINES {
        ingest_jsonl(&store, airline, &core_fixture(&format!("tweets-{}.jsonl", airline.slug())));
    }
    store
}

fn app(store: Store, load: bool) -> (Router, Arc<AppState>) {
    let state = Arc::new(AppState::new(store, Normalizer::default(), ServiceDefaults::default()));
    if load {
        state.refresh().unwrap();
    }
    (router(state.clone(), None), state)
}

async fn call(app: &Router, method: &str, uri: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body)
}

async fn get<T: serde::de::DeserializeOwned>(app: &Router, uri: &str) -> T {
    let (status, body) = call(app, "GET", uri).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {}", String::from_utf8_lossy(&body));
    serde_json::from_slice(&body).unwrap()
}

async fn status_of(app: &Router, uri: &str) -> StatusCode {
    let (status, body) = call(app, "GET", uri).await;
    if status != StatusCode::OK {
        let doc: ErrorDoc = serde_json::from_slice(&body).unwrap();
        assert_eq!(doc.status, status.as_u16());
        assert_eq!(doc.schema_version, 1);
    }
    status
}

#[tokio::test]
async fn unavailable_until_loaded() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(Store::open(dir.path()).unwrap(), false);
    assert_eq!(status_of(&app, "/api/airlines").await, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(status_of(&app, "/api/series/delta").await, StatusCode::SERVICE_UNAVAILABLE);
    let (status, _) = call(&app, "POST", "/api/refresh").await;
    assert_eq!(status, StatusCode::OK);
    let doc: AirlinesDoc = get(&app, "/api/airlines").await;
    assert!(doc.airlines.is_empty());
}

#[tokio::test]
async fn airline_counts_match_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store(dir.path());
    let (app, _) = app(store.clone(), true);
    let doc: AirlinesDoc = get(&app, "/api/airlines").await;
    assert_eq!(doc.schema_version, 1);
    let names: Vec<Airline> = doc.airlines.iter().map(|a| a.airline).collect();
    assert_eq!(names, vec![Airline::American, Airline::Delta]);
    for entry in &doc.airlines {
        let (from, to) = store.coverage(entry.airline).unwrap().unwrap();
        assert_eq!(entry.records, store.load_range(entry.airline, from, to).unwrap().len());
        assert_eq!(entry.scored, entry.records);
        assert_eq!((entry.first_date, entry.last_date), (Some(from), Some(to)));
    }
}

#[tokio::test]
async fn series_and_breakouts_equal_report() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store(dir.path());
    let (app, _) = app(store.clone(), true);
    let normalizer = Normalizer::default();
    for (airline, date, head) in scripted_anomalies() {
        let (from, to) = store.coverage(airline).unwrap().unwrap();
        let mut params = ReportParams::new(airline, from, to);
        params.series.window = 14;
        params.series.multiplier = 2.0;
        let report = analyze(&store.load_all(airline).unwrap(), &normalizer, &params).unwrap();

        let uri = format!("/api/series/{}?window=14&k=2", airline.slug());
        let series: SeriesDoc = get(&app, &uri).await;
        assert_eq!(series, series_doc(&report));
        let (_, first) = call(&app, "GET", &uri).await;
        let (_, second) = call(&app, "GET", &uri).await;
        assert_eq!(first, second);

        let uri = format!("/api/breakouts/{}?window=14&k=2", airline.slug());
        let breakouts: BreakoutsDoc = get(&app, &uri).await;
        assert_eq!(breakouts, breakouts_doc(&report));
        assert_eq!(breakouts.breakouts.len(), 1);
        assert_eq!(breakouts.breakouts[0].date, date);
        assert_eq!(breakouts.breakouts[0].top_words[0].word, head);
        assert_eq!(breakouts.breakouts[0].top_words.len(), 5);
    }
}

#[tokio::test]
async fn band_parameters_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(fixture_store(dir.path()), true);
    for (uri, expected) in [
        ("/api/series/delta?window=0", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?window=-3", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?window=999", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?k=0", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?k=abc", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?from=2023-03-10&to=2023-03-01", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/delta?from=03/01/2023", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/breakouts/delta?window=0", StatusCode::UNPROCESSABLE_ENTITY),
        ("/api/series/lufthansa", StatusCode::NOT_FOUND),
        ("/api/breakouts/lufthansa", StatusCode::NOT_FOUND),
        ("/api/series/united", StatusCode::NOT_FOUND),
        ("/api/series/delta?from=2024-01-01&to=2024-02-01", StatusCode::NOT_FOUND),
        ("/api/series/delta?window=7&k=1.5", StatusCode::OK),
    ] {
        assert_eq!(status_of(&app, uri).await, expected, "{uri}");
    }
}

#[tokio::test]
async fn constant_partition_has_no_breakouts() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    // Without the scripted tweets every fixture day has the same composition.
    let jsonl: String = std::fs::read_to_string(core_fixture("tweets-delta.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| !l.contains("\"tweet_id\":\"16104601"))
        .map(|l| format!("{l}\n"))
        .collect();
    let path = dir.path().join("constant.jsonl");
    std::fs::write(&path, jsonl).unwrap();
    ingest_jsonl(&store, Airline::Delta, &path);
    let (app, _) = app(store, true);
    let doc: BreakoutsDoc = get(&app, "/api/breakouts/delta").await;
    assert!(doc.breakouts.is_empty());
    let series: SeriesDoc = get(&app, "/api/series/delta").await;
    assert!(series.constant);
}

fn search_store(dir: &Path) -> Store {
    let store = Store::open(dir.join("store")).unwrap();
    let lines = [
        ("1", "2023-02-01T08:00:00Z", "@united flight cancelled, great"),
        ("2", "2023-02-01T09:00:00Z", "@united lovely crew"),
        ("3", "2023-02-02T10:00:00Z", "@united they canceled my trip"),
        ("4", "2023-02-03T11:00:00Z", "@united why cancel now"),
        ("5", "2023-02-03T12:00:00Z", "@united on time for once"),
    ];
    let jsonl: String = lines
        .iter()
        .map(|(id, ts, text)| {
            format!(
                "{{\"tweet_id\":\"{id}\",\"text\":\"{text}\",\"created_at\":\"{ts}\",\"author_id\":\"7\",\"author_location\":null,\"lang\":\"en\",\"is_retweet\":false}}\n"
            )
        })
        .collect();
    let path = dir.join("united.jsonl");
    std::fs::write(&path, jsonl).unwrap();
    ingest_jsonl(&store, Airline::United, &path);
    store
}

#[tokio::test]
async fn keyword_search_and_pagination() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(search_store(dir.path()), true);
    let doc: SearchDoc = get(&app, "/api/search/united?q=cancel").await;
    let ids: Vec<&str> = doc.results.iter().map(|h| h.tweet_id.as_str()).collect();
    assert_eq!(ids, vec!["1", "3", "4"]);
    assert_eq!(doc.total, 3);
    assert!(doc.next_cursor.is_none());
    assert!(doc.results.iter().all(|h| h.p_positive.unwrap() + h.p_negative.unwrap() == 1.0));

    let absent: SearchDoc = get(&app, "/api/search/united").await;
    assert!(absent.results.is_empty() && absent.q.is_none());
    assert_eq!(status_of(&app, "/api/search/united?q=").await, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(status_of(&app, "/api/search/united?q=%20").await, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(status_of(&app, "/api/search/nowhere?q=cancel").await, StatusCode::NOT_FOUND);
    assert_eq!(status_of(&app, "/api/search/united?q=cancel&limit=0").await, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(status_of(&app, "/api/search/united?q=cancel&cursor=x").await, StatusCode::UNPROCESSABLE_ENTITY);

    let ranged: SearchDoc = get(&app, "/api/search/united?q=cancel&from=2023-02-02&to=2023-02-03").await;
    assert_eq!(ranged.total, 2);

    for limit in 1..=4 {
        let mut seen = Vec::new();
        let mut cursor: Option<String> = None;
        loop {
            let uri = match &cursor {
                Some(c) => format!("/api/search/united?q=cancel&limit={limit}&cursor={c}"),
                None => format!("/api/search/united?q=cancel&limit={limit}"),
            };
            let page: SearchDoc = get(&app, &uri).await;
            assert!(page.results.len() <= limit);
            seen.extend(page.results.into_iter().map(|h| h.tweet_id));
            match page.next_cursor {
                Some(c) => cursor = Some(c),
                None => break,
            }
        }
        assert_eq!(seen, ids, "limit {limit}");
    }
}

#[tokio::test]
async fn requests_never_write_to_the_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = fixture_store(dir.path());
    let before = store.fingerprint().unwrap();
    let (app, _) = app(store.clone(), true);
    for uri in [
        "/api/airlines",
        "/api/series/delta",
        "/api/breakouts/american?window=7&k=1",
        "/api/search/delta?q=cancel",
        "/api/series/delta?window=0",
    ] {
        call(&app, "GET", uri).await;
    }
    call(&app, "POST", "/api/refresh").await;
    assert_eq!(store.fingerprint().unwrap(), before);
}

#[tokio::test]
async fn refresh_swaps_in_new_data() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let (app, state) = app(store.clone(), true);
    let first = state.snapshot().unwrap();
    assert!(get::<AirlinesDoc>(&app, "/api/airlines").await.airlines.is_empty());
    ingest_jsonl(&store, Airline::Delta, &core_fixture("tweets-delta.jsonl"));
    // Still the old snapshot until refreshed.
    assert!(get::<AirlinesDoc>(&app, "/api/airlines").await.airlines.is_empty());
    let (status, _) = call(&app, "POST", "/api/refresh").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(get::<AirlinesDoc>(&app, "/api/airlines").await.airlines.len(), 1);
    assert!(first.summaries.is_empty());
}

#[tokio::test]
async fn cors_is_permissive() {
    let dir = tempfile::tempdir().unwrap();
    let (app, _) = app(Store::open(dir.path()).unwrap(), true);
    let req = Request::builder()
        .uri("/api/airlines")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}
