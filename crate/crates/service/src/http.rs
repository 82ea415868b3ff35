//! Local HTTP API over the run state machine.
//!
//! Routes:
//! `POST /run {"participant"}`, `GET /trial`, `GET /audio?which=A|B`,
//! `POST /gain {"delta"}`, `POST /next`, `POST /stop`, `GET /progress`.
//! Every route after `/run` accepts `?participant=ID`; without it the most
//! recently started run is used.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use booster_core::plan::ScheduledTrial;
use booster_core::stimulus::StimulusSet;
use serde::Deserialize;
use serde_json::json;

use crate::error::{Result, ServiceError};
use crate::run::{Run, RunConfig, Which};

pub struct Service {
    schedule: BTreeMap<String, Vec<ScheduledTrial>>,
    stimuli: Arc<StimulusSet>,
    log_path: PathBuf,
    config: RunConfig,
    runs: Mutex<Runs>,
}

#[derive(Default)]
struct Runs {
    by_participant: BTreeMap<String, Arc<Mutex<Run>>>,
    latest: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Json(serde_json::Value),
    Wav(Arc<Vec<u8>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Body,
}

impl Response {
    fn ok(value: serde_json::Value) -> Self {
        Self {
            status: 200,
            body: Body::Json(value),
        }
    }

    fn error(err: &ServiceError) -> Self {
        let status = match err {
            ServiceError::UnknownParticipant(_) | ServiceError::NoRun => 404,
            ServiceError::RunComplete => 409,
            ServiceError::InvalidDelta(_) | ServiceError::BadRequest(_) => 400,
            ServiceError::LogMismatch(_) => 409,
            ServiceError::Core(_) | ServiceError::Io(_) => 500,
        };
        Self {
            status,
            body: Body::Json(json!({ "error": err.to_string() })),
        }
    }

    pub fn json(&self) -> Option<&serde_json::Value> {
        match &self.body {
            Body::Json(v) => Some(v),
            Body::Wav(_) => None,
        }
    }
}

#[derive(Deserialize)]
struct RunRequest {
    participant: String,
}

#[derive(Deserialize)]
struct GainRequest {
    delta: i32,
}

fn query_param<'a>(query: &'a str, key: &str) -> Option<&'a str> {
    query
        .split('&')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v)
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

impl Service {
    pub fn new(
        schedule: BTreeMap<String, Vec<ScheduledTrial>>,
        stimuli: Arc<StimulusSet>,
        log_path: impl Into<PathBuf>,
        config: RunConfig,
    ) -> Self {
        Self {
            schedule,
            stimuli,
            log_path: log_path.into(),
            config,
            runs: Mutex::new(Runs::default()),
        }
    }

    pub fn start_run(&self, participant: &str) -> Result<Arc<Mutex<Run>>> {
        let run = Run::start(
            &self.schedule,
            participant,
            self.stimuli.clone(),
            &self.log_path,
            self.config.clone(),
        )?;
        let run = Arc::new(Mutex::new(run));
        let mut runs = self.runs.lock().unwrap_or_else(|e| e.into_inner());
        runs.by_participant.insert(participant.to_string(), run.clone());
        runs.latest = Some(participant.to_string());
        Ok(run)
    }

    fn run_for(&self, query: &str) -> Result<Arc<Mutex<Run>>> {
        let runs = self.runs.lock().unwrap_or_else(|e| e.into_inner());
        let id = match query_param(query, "participant") {
            Some(id) => id.to_string(),
            None => runs.latest.clone().ok_or(ServiceError::NoRun)?,
        };
        runs.by_participant.get(&id).cloned().ok_or(ServiceError::NoRun)
    }

    /// Route one request. Pure apart from the run state and the trial log.
    pub fn handle(&self, method: &str, path: &str, body: &[u8]) -> Response {
        let (route, query) = path.split_once('?').unwrap_or((path, ""));
        match self.dispatch(method, route, query, body) {
            Ok(r) => r,
            Err(e) => Response::error(&e),
        }
    }

    fn dispatch(&self, method: &str, route: &str, query: &str, body: &[u8]) -> Result<Response> {
        if (method, route) == ("POST", "/run") {
            let req: RunRequest = parse_body(body)?;
            let run = self.start_run(&req.participant)?;
            let view = run.lock().unwrap_or_else(|e| e.into_inner()).view();
            return Ok(Response::ok(json!(view)));
        }
        let run = self.run_for(query)?;
        let mut run = run.lock().unwrap_or_else(|e| e.into_inner());
        let response = match (method, route) {
            ("GET", "/trial") => Response::ok(json!(run.view())),
            ("GET", "/progress") => Response::ok(json!(run.progress())),
            ("GET", "/audio") => {
                let which: Which = query_param(query, "which")
                    .ok_or_else(|| ServiceError::BadRequest("missing `which`".into()))?
                    .parse()?;
                Response {
                    status: 200,
                    body: Body::Wav(run.request_audio(which)?),
                }
            }
            ("POST", "/gain") => {
                let req: GainRequest = parse_body(body)?;
                Response::ok(json!(run.adjust_gain(req.delta)?))
            }
            ("POST", "/next") => {
                run.commit()?;
                Response::ok(json!(run.view()))
            }
            ("POST", "/stop") => {
                run.stop();
                Response::ok(json!(run.view()))
            }
            _ => {
                return Err(ServiceError::BadRequest(format!("no route {method} {route}")));
            }
        };
        Ok(response)
    }
}

/// A running server; dropping it leaves the thread running, call
/// [`Server::shutdown`] to stop.
pub struct Server {
    inner: Arc<tiny_http::Server>,
    addr: SocketAddr,
    thread: Option<JoinHandle<()>>,
}

impl Server {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.inner.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    /// Block until the server thread exits.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Bind `addr` (port 0 picks a free port) and serve on a background thread.
pub fn spawn(service: Arc<Service>, addr: &str) -> Result<Server> {
    let inner = tiny_http::Server::http(addr)
        .map_err(|e| ServiceError::Io(std::io::Error::other(e)))?;
    let addr = inner
        .server_addr()
        .to_ip()
        .ok_or_else(|| ServiceError::BadRequest("server is not bound to an IP socket".into()))?;
    let inner = Arc::new(inner);
    let server = inner.clone();
    let thread = std::thread::spawn(move || {
        for mut request in server.incoming_requests() {
            let mut body = Vec::new();
            if let Err(e) = request.as_reader().read_to_end(&mut body) {
                tracing::warn!("failed to read request body: {e}");
                continue;
            }
            let method = request.method().as_str().to_string();
            let url = request.url().to_string();
            let response = service.handle(&method, &url, &body);
            tracing::debug!(%method, %url, status = response.status, "request");
            let (bytes, content_type) = match response.body {
                Body::Json(v) => (v.to_string().into_bytes(), "application/json"),
                Body::Wav(b) => (b.as_ref().clone(), "audio/wav"),
            };
            let header = tiny_http::Header::from_bytes("Content-Type", content_type)
                .expect("static header is valid");
            let cors = tiny_http::Header::from_bytes("Access-Control-Allow-Origin", "*")
                .expect("static header is valid");
            let reply = tiny_http::Response::from_data(bytes)
                .with_status_code(response.status)
                .with_header(header)
                .with_header(cors);
            if let Err(e) = request.respond(reply) {
                tracing::warn!("failed to send response: {e}");
            }
        }
    });
    Ok(Server {
        inner,
        addr,
        thread: Some(thread),
    })
}
