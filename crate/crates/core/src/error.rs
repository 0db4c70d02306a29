use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a probability vector: {0}")]
    NotAProbability(String),

    #[error("offspring distribution has zero variance")]
    DegenerateVariance,

    #[error("offspring distribution is not critical (mean = {mean})")]
    NotCritical { mean: f64 },

    #[error("unknown distribution name `{0}`")]
    UnknownName(String),

    #[error("bad distribution parameter: {0}")]
    BadParam(String),

    #[error("degree sequence completes a tree at position {at} but has length {len}")]
    TreeCompletesEarly { at: usize, len: usize },

    #[error("degree sequence does not complete a tree")]
    TreeUnfinished,

    #[error("degree sum is {sum}, expected {expected}")]
    SumMismatch { sum: u64, expected: u64 },

    #[error("size {n} exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("no tree of size {n} exists for this offspring distribution")]
    InfeasibleSize { n: u64 },

    #[error("sampling budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("working precision exhausted at x = {x}")]
    PrecisionExhausted { x: usize },

    #[error("root is not bracketed at x = {x} (numerical failure)")]
    NoBracket { x: usize },

    #[error("k must be at least {min}, got {k}")]
    BadK { k: usize, min: usize },

    #[error("offspring support is contained in {{0, 1}}")]
    NoBranching,

    #[error("empty sample")]
    EmptySample,

    #[error("unsupported statistic `{0}`")]
    UnsupportedStatistic(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("size {n}, replicate {replicate}: {source}")]
    Replicate {
        n: u64,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a resource cap rather than bad input.
    pub fn is_runtime_budget(&self) -> bool {
        match self {
            Error::BudgetExceeded(_) | Error::PrecisionExhausted { .. } | Error::NoBracket { .. } => true,
            Error::Replicate { source, .. } => source.is_runtime_budget(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
