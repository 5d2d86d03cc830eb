use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown object type `{0}`")]
    UnknownType(String),
    #[error("duplicate event id `{0}`")]
    DuplicateEvent(String),
    #[error("event `{0}` has a non-finite timestamp")]
    NonFiniteTime(String),
}

#[derive(Debug, Error)]
pub enum OcelError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in `{subject}`: {message}")]
    Schema { subject: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl OcelError {
    pub(crate) fn schema(subject: impl Into<String>, message: impl Into<String>) -> Self {
        OcelError::Schema {
            subject: subject.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("event `{event}` is not part of execution {exec_id}")]
    NotInExecution { event: String, exec_id: usize },
    #[error("attribute `{attribute}` of event `{event}` is not numeric")]
    TypeMismatch { event: String, attribute: String },
    #[error("feature `{0}` is a family; expand it before computing")]
    UnexpandedFamily(String),
    #[error("feature `{0}` needs an execution context")]
    UnsupportedSpec(String),
    #[error("invalid feature spec `{spec}`: {reason}")]
    Syntax { spec: String, reason: String },
    #[error("row (event `{event}`, execution {exec_id}): {source}")]
    AtRow {
        event: String,
        exec_id: usize,
        #[source]
        source: Box<FeatureError>,
    },
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown execution {0}")]
    UnknownExecution(usize),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}
