use thiserror::Error;

/// Errors raised while loading data or analysing a discourse.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid annotation for {id}: {message}")]
    InvalidAnnotation { id: String, message: String },

    #[error("duplicate eventuality id `{0}`")]
    DuplicateId(String),

    #[error("unknown cue `{0}`")]
    UnknownCue(String),

    #[error("unknown relation node `{0}`")]
    UnknownNode(String),

    #[error("relation lattice is malformed: {0}")]
    Lattice(String),

    #[error("empty discourse")]
    EmptyDiscourse,

    #[error("thread {0} is not open")]
    ThreadNotOpen(usize),

    #[error("a new thread may only start with a past perfect clause or when no attachment is feasible")]
    NewThreadNotPermitted,

    /// Every candidate reading died on an explicit-marker clash.
    #[error("no consistent reading at {at}: {}", clashes.join("; "))]
    ParseFailure { at: String, clashes: Vec<String> },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
