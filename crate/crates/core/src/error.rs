use std::path::PathBuf;

use thiserror::Error;

/// Location-tagged error raised while reading PDDL, grounded dumps, model
/// files and observation files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(ParseError),

    #[error("unsupported construct `{construct}` at {line}:{col}")]
    Unsupported { construct: String, line: usize, col: usize },

    #[error("grounding aborted: more than {cap} grounded actions")]
    GroundingBlowUp { cap: usize },

    #[error("action {action} is not applicable; missing {}", missing.join(" "))]
    Inapplicable { action: String, missing: Vec<String> },

    #[error("unknown action {0}")]
    UnknownAction(String),

    #[error("unknown fact {0}")]
    UnknownFact(String),

    #[error("unknown goal {0}")]
    UnknownGoal(String),

    #[error("goal is not reachable in the delete relaxation: {0}")]
    UnsolvableGoal(String),

    #[error("fact {0} is not a landmark of any goal")]
    UndefinedLandmark(String),

    #[error("empty goal set")]
    EmptyGoals,

    #[error("grid is not connected: {0} unreachable from {1}")]
    DisconnectedGrid(String, String),

    #[error("invalid cross-validation request: {0}")]
    InvalidCv(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {inner}")]
    AtLine { line: usize, inner: Box<Error> },

    #[error("{}:{line}: {inner}", path.display())]
    AtFile { path: PathBuf, line: usize, inner: Box<Error> },

    #[error("{} errors while loading:\n{}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Many(Vec<Error>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Syntax(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
