use thiserror::Error;

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("participant `{0}` is not in the schedule")]
    UnknownParticipant(String),

    #[error("no run in progress")]
    NoRun,

    #[error("no active trial: the run is complete")]
    RunComplete,

    #[error("gain step must be +1 or -1 dB, got {0}")]
    InvalidDelta(i32),

    #[error("trial log does not match the schedule: {0}")]
    LogMismatch(String),

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error(transparent)]
    Core(#[from] booster_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
