//! Feature extraction and encoding for object-centric event logs.
//!
//! The pipeline: parse an OCEL JSON file ([`ocel`]), build the object graph
//! ([`graph`]), extract process executions ([`executions`]), compute features
//! per event and execution ([`features`]), then write tabular, sequential or
//! graph encodings ([`encoders`]). [`timeseries`] aggregates event-local
//! features over fixed windows of the whole log.

pub mod cli;
pub mod encoders;
pub mod error;
pub mod executions;
pub mod features;
pub mod graph;
pub mod model;
pub mod ocel;
pub mod timeseries;
pub mod union_find;

pub use error::{EncodeError, FeatureError, ModelError, OcelError};
pub use executions::{
    extract, extract_components, extract_leading_type, ExecutionGraph, Extraction,
    ProcessExecution, Strategy,
};
pub use features::{compute, compute_matrix, FeatureMatrix, FeatureSpec};
pub use graph::{Distance, ObjectGraph};
pub use model::{
    validate, AttributeValue, EventIdx, EventLog, EventLogBuilder, ObjectIdx, ValidationReport,
};
pub use ocel::{parse_ocel, parse_ocel_str, write_ocel};
