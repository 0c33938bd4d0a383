use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value {value} at node {node} ({location:?})")]
    NonFinite {
        node: usize,
        location: Vec<f64>,
        value: f64,
    },
    #[error("empty integration region")]
    EmptyRegion,
    #[error("normal stencil unavailable at boundary sample {0}")]
    MissingStencil(usize),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("ball inclusion needs m > 0, got m = {0}")]
    InclusionHypothesis(f64),
    #[error("{0}")]
    Hypothesis(String),
    #[error("no branch applies: {0}")]
    NoBranch(String),
    #[error("solver did not converge after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },
    #[error("no sign change found for {what} in [{lo:e}, {hi:e}]")]
    Bracketing { what: String, lo: f64, hi: f64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("unknown registry name `{0}`")]
    UnknownName(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
