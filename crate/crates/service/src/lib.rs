//! Live listening service: serves Sound A/B for each scheduled trial, takes
//! 1 dB adjustments to Sound A and appends committed trials to a log.

pub mod error;
pub mod http;
pub mod run;

pub use error::{Result, ServiceError};
pub use http::{spawn, Body, Response, Server, Service};
pub use run::{GainOutcome, Phase, Progress, Run, RunConfig, RunSnapshot, TrialView, Which, DEFAULT_CLAMP_DB};
