use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("example has {found} features but the window holds {expected}-dimensional examples")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("window capacity must be positive")]
    ZeroCapacity,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("empty scenario name")]
    Empty,
    #[error("unknown scenario term `{0}`")]
    UnknownTerm(String),
    #[error("term `{term}`: {reason}")]
    OutOfRange { term: String, reason: String },
    #[error("term `{term}` conflicts with an earlier term")]
    Conflict { term: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabelerError {
    #[error("labeling needs at least {k} reference examples, got {found}")]
    SampleTooSmall { k: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoissonError {
    #[error("poisson rate must be finite and non-negative, got {0}")]
    InvalidRate(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("score matrix needs at least {0}")]
    TooSmall(&'static str),
    #[error("row {row} has {found} scores, expected {expected}")]
    NotRectangular {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no studentized range constant for k = {0} (supported: 2..=10)")]
    UnsupportedK(usize),
    #[error("score matrix contains a non-finite value")]
    NonFinite,
}
