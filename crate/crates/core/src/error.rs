use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("removal data must contain at least one time")]
    EmptyData,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("length mismatch: {infections} infection times for {removals} removal times")]
    LengthMismatch { infections: usize, removals: usize },

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("time {t} is outside the rate support [{start}, {end}]")]
    OutsideSupport { t: f64, start: f64, end: f64 },

    #[error("basis index {index} out of range for {count} basis functions")]
    BasisIndex { index: usize, count: usize },

    #[error("invalid rate configuration: {0}")]
    InvalidRate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no valid initial state after {0} attempts")]
    Initialization(usize),

    #[error("empty sample set")]
    NoSamples,

    #[error("population {population} is smaller than the number of cases {cases}")]
    PopulationTooSmall { population: usize, cases: usize },

    #[error("no outbreak reached final size {threshold} in {attempts} attempts")]
    NoMajorOutbreak { threshold: usize, attempts: usize },

    #[error("failed to parse removal data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
