use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("count {count} at index {index} exceeds m = {m}")]
    CountOutOfRange { index: usize, count: u64, m: u64 },
    #[error("value {value} at index {index} lies outside [{lo}, {hi}]")]
    OutOfSupport { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("empty half; choose different mu ({0})")]
    EmptyHalf(&'static str),
    #[error("degenerate split: alpha_l(mu) = {0}")]
    DegenerateSplit(f64),
    #[error("density is negative on [{lo}, {hi}]")]
    NegativeDensity { lo: f64, hi: f64 },
    #[error("all {0} bootstrap replicates were infeasible")]
    AllInfeasible(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
