use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("linear map is not surjective (rank {rank} < {target})")]
    NotSurjective { rank: usize, target: usize },

    #[error("groebner budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("ham-sandwich search failed after {restarts} restarts ({sets} sets in dimension {dim})")]
    CutSearchFailed { restarts: usize, sets: usize, dim: usize },

    #[error("degree cap {cap} exceeded (needed {needed})")]
    DegreeCap { cap: usize, needed: usize },

    #[error("projection failed: {0}")]
    Projection(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("tree node {path:?}: {source}")]
    Node {
        path: Vec<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_level(self, level: usize) -> Error {
        Error::Level {
            level,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
