use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("instance generation failed after {budget} regenerations")]
    GenerationFailed { budget: u32 },

    #[error("suite cell (size {size}, agents {agents}, index {index}): {source}")]
    Cell {
        size: u32,
        agents: u32,
        index: u32,
        source: Box<Error>,
    },

    #[error("unknown waypoint {0}")]
    UnknownWaypoint(u32),

    #[error("invalid motion graph: {0}")]
    InvalidGraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation in `{field}`: {reason}")]
    SchemaViolation { field: String, reason: String },

    #[error("arity mismatch: expected {expected} agents, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("move component {agent} does not start at the state's waypoint")]
    InapplicableMove { agent: usize },

    #[error("no path from waypoint {from} to waypoint {to}")]
    Unreachable { from: u32, to: u32 },

    #[error("search tree is empty")]
    EmptyTree,

    #[error("unknown tree vertex {0}")]
    UnknownVertex(usize),

    #[error("reparenting vertex {vertex} under {parent} would create a cycle")]
    CyclicRewire { vertex: usize, parent: usize },

    #[error("unknown algorithm `{0}` (expected one of ja, marrtstar, ismarrtstar)")]
    UnknownAlgorithm(String),

    #[error("soundness failure: {0}")]
    Soundness(String),

    #[error("cost {cost} is below the optimal cost {optimal}")]
    CostBelowOptimal { cost: f64, optimal: f64 },

    #[error("solution steps have differing durations; `dt` cannot represent them")]
    NonUniformTimestep,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::SchemaViolation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
