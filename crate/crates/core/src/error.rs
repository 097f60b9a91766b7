use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,
    #[error("time horizon n={n} is too short (need n >= {min})")]
    HorizonTooShort { n: usize, min: usize },
    #[error("time {t} out of range 1..={n}")]
    TimeOutOfRange { t: usize, n: usize },
    #[error("window exceeds horizon: probe {t} with width {width} does not fit in n={n}")]
    WindowExceedsHorizon { t: usize, width: usize, n: usize },
    #[error("time mismatch: empirical measure at t={empirical}, model distribution at t={model}")]
    TimeMismatch { empirical: usize, model: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("edges-per-arrival mismatch: trajectory has m={trajectory}, model has m={model}")]
    EdgeCountMismatch { trajectory: usize, model: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed trajectory (line {line}): {msg}")]
    Parse { line: usize, msg: String },
    #[error("insufficient tail: only {populated} populated tail bins (need 5)")]
    InsufficientTail { populated: usize },
    #[error("models not separated at this n (S gap {gap})")]
    NotSeparated { gap: f64 },
    #[error("degenerate experiment: null and alternative models are identical")]
    DegenerateExperiment,
    #[error("enumeration oracle supports n <= 6 and m = 1 (got n={n}, m={m})")]
    OracleTooLarge { n: usize, m: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
