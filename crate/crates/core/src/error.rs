use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("coherence needs at least two columns, got {0}")]
    Degenerate(usize),
    #[error("empty input list")]
    EmptyList,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate index {0} in support set")]
    DuplicateIndex(usize),
    #[error("restricted Gram matrix is numerically singular (eigenvalue ratio {ratio:e})")]
    SingularGram { ratio: f64 },
    #[error("support of size {support} exceeds the {rows} available rows")]
    SupportTooLarge { support: usize, rows: usize },
    #[error("support already contains all {0} columns")]
    FullSupport(usize),
    #[error("requested {steps} steps but at most {max} are possible")]
    TooManySteps { steps: usize, max: usize },
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("no votes received")]
    NoVotes,
    #[error("need {needed} machines but only {have} are available")]
    InsufficientMachines { needed: usize, have: usize },
    #[error("machine {machine} failed: {source}")]
    MachineFailed {
        machine: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("mutual incoherence violated: (2K-1)*mu = {0} >= 1")]
    MipViolated(f64),
    #[error("dimension too small: leading factor {0} is not positive")]
    DegenerateDimension(f64),
    #[error("machine count infeasible (log value {log_value})")]
    Infeasible { log_value: f64 },
    #[error("no undetected support index remains")]
    EmptyResidualSupport,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("rho[{0}] is below r")]
    RhoBelowR(usize),
    #[error("coefficient pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
