use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    SampleRateMismatch { left: u32, right: u32 },

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot normalize a silent buffer")]
    Silent,

    #[error("no initial gain configured for signal {signal}, noise {noise}")]
    MissingGain { signal: char, noise: char },

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed gain table: {0}")]
    GainTable(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("trial log error: {0}")]
    TrialLog(String),

    #[error("screening error: {0}")]
    Screening(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
