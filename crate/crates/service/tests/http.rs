mod common;

use std::io::Read;
use std::sync::Arc;

use booster_core::record::read_log_file;
use booster_service::{spawn, Body, RunConfig, Service};
use common::{schedule, short_set, TEST_TAPS};
use serde_json::{json, Value};

fn service(dir: &tempfile::TempDir) -> Arc<Service> {
    let config = RunConfig {
        taps: TEST_TAPS,
        ..RunConfig::default()
    };
    Arc::new(Service::new(schedule(3), short_set(), dir.path().join("log.jsonl"), config))
}

fn post(svc: &Service, path: &str, body: Value) -> (u16, Value) {
    let r = svc.handle("POST", path, body.to_string().as_bytes());
    (r.status, r.json().cloned().unwrap_or(Value::Null))
}

fn get(svc: &Service, path: &str) -> (u16, Value) {
    let r = svc.handle("GET", path, b"");
    (r.status, r.json().cloned().unwrap_or(Value::Null))
}

#[test]
fn routes_report_errors_with_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(&dir);
    assert_eq!(get(&svc, "/trial").0, 404);
    assert_eq!(post(&svc, "/run", json!({"participant": "nobody"})).0, 404);
    assert_eq!(post(&svc, "/run", json!({"who": "P1"})).0, 400);
    assert_eq!(post(&svc, "/run", json!({"participant": "P1"})).0, 200);
    assert_eq!(post(&svc, "/gain", json!({"delta": 3})).0, 400);
    assert_eq!(get(&svc, "/audio").0, 400);
    assert_eq!(get(&svc, "/audio?which=C").0, 400);
    assert_eq!(get(&svc, "/nowhere").0, 400);
    let r = svc.handle("GET", "/audio?which=B", b"");
    assert!(matches!(r.body, Body::Wav(ref b) if b.starts_with(b"RIFF")));
}

#[test]
fn runs_for_different_participants_are_independent() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(&dir);
    post(&svc, "/run", json!({"participant": "P1"}));
    post(&svc, "/gain?participant=P1", json!({"delta": 1}));
    post(&svc, "/run", json!({"participant": "P2"}));
    post(&svc, "/next", json!({}));
    assert_eq!(get(&svc, "/trial?participant=P1").1["gain_db"], 1);
    assert_eq!(get(&svc, "/trial?participant=P1").1["number"], 1);
    assert_eq!(get(&svc, "/trial").1["number"], 2);
    assert_eq!(get(&svc, "/progress").1["participant"], "P2");
}

#[test]
fn responses_never_reveal_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(&dir);
    let mut bodies = vec![post(&svc, "/run", json!({"participant": "P3"})).1];
    for i in 0..36 {
        bodies.push(get(&svc, "/trial").1);
        bodies.push(post(&svc, "/gain", json!({"delta": if i % 2 == 0 { 1 } else { -1 }})).1);
        bodies.push(post(&svc, "/stop", json!({})).1);
        bodies.push(post(&svc, "/next", json!({})).1);
        bodies.push(get(&svc, "/progress").1);
    }
    for b in bodies {
        let text = b.to_string();
        for word in ["Original", "Low", "High", "All", "method", "fc", "signal", "noise", "condition"] {
            assert!(!text.contains(word), "`{word}` leaked in {text}");
        }
    }
}

fn call(agent: &ureq::Agent, base: &str, method: &str, path: &str, body: Option<Value>) -> Value {
    let req = agent.request(method, &format!("{base}{path}"));
    let resp = match body {
        Some(b) => req.send_string(&b.to_string()),
        None => req.call(),
    }
    .unwrap();
    serde_json::from_str(&resp.into_string().unwrap()).unwrap()
}

#[test]
fn robot_listener_completes_a_run_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(&dir);
    let server = spawn(svc.clone(), "127.0.0.1:0").unwrap();
    let base = format!("http://{}", server.addr());
    let agent = ureq::Agent::new();

    let view = call(&agent, &base, "POST", "/run", Some(json!({"participant": "P1"})));
    assert_eq!(view["total"], 36);
    let mut number = 1;
    while !call(&agent, &base, "GET", "/trial", None)["complete"].as_bool().unwrap() {
        for which in ["A", "B"] {
            let resp = agent.get(&format!("{base}/audio?which={which}")).call().unwrap();
            assert_eq!(resp.content_type(), "audio/wav");
            let mut bytes = Vec::new();
            resp.into_reader().read_to_end(&mut bytes).unwrap();
            assert!(bytes.len() > 44);
        }
        for _ in 0..(number % 7) {
            call(&agent, &base, "POST", "/gain", Some(json!({"delta": 1})));
        }
        let after = call(&agent, &base, "POST", "/next", Some(json!({})));
        number += 1;
        assert_eq!(after["gain_db"], 0);
    }
    let progress = call(&agent, &base, "GET", "/progress", None);
    assert_eq!(progress["completed"], 36);
    server.shutdown();

    let log = read_log_file(&dir.path().join("log.jsonl")).unwrap();
    assert_eq!(log.len(), 36);
    for (i, r) in log.iter().enumerate() {
        assert_eq!(r.bhld_db, (i as i32 + 1) % 7);
    }
}
