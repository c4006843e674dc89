use thiserror::Error;

/// Errors produced by the maintainability pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has no positive mass (sum {sum:e})")]
    ZeroVector { sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid growth factor: alpha = {0} (must be >= -1)")]
    InvalidGrowth(f64),

    #[error("malformed record{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    MalformedRecord { line: Option<usize>, reason: String },

    #[error("no records")]
    NoRecords,

    #[error("person {person} stays beyond maximal seniority {max_seniority} at time {time}")]
    SeniorityOverflow { person: String, time: u64, max_seniority: usize },

    #[error("invalid semi-Markov kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid seniority weights: {0}")]
    InvalidWeights(String),

    #[error(
        "state {state} has staying probability {value} at maximal seniority; no seniority-based destination exists"
    )]
    MaxSeniorityOverflow { state: usize, value: f64 },

    #[error("block {block} row {row}: replacement inflow {value} is negative for this growth factor")]
    NegativeReplacement { block: usize, row: usize, value: f64 },

    #[error("path is not maintainable at step {step}: block {block} needs recruitment {required}")]
    NonMaintainable { step: usize, block: usize, required: f64 },

    #[error("block chain {block} does not have a unique fixed point ({classes} recurrent classes)")]
    FixedPointNotUnique { block: usize, classes: usize },

    #[error("linear system is singular or ill-conditioned")]
    SingularSystem,

    #[error("model has unidentified rows {rows:?}; pass allow-unidentified to override")]
    Unidentified { rows: Vec<(usize, usize)> },

    #[error("region has neither a vertex nor a halfspace representation")]
    NoRepresentation,

    #[error("vertex enumeration limited to dimension 10, got {0}")]
    DimensionTooLarge(usize),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("unsupported file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
