use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line_no}: malformed record: {reason}")]
    MalformedLine { line_no: usize, reason: String },
    #[error("instance {0}: span out of bounds")]
    SpanOutOfBounds(String),
    #[error("instance {id}: span text {found:?} does not match surface {surface:?}")]
    SpanMismatch {
        id: String,
        surface: String,
        found: String,
    },
    #[error("instance {0}: overlapping or unsorted entity spans")]
    OverlappingSpans(String),
    #[error("instance {0}: head and tail are the same entity")]
    SelfRelation(String),
    #[error("instance {id}: unknown label {label:?}")]
    UnknownLabel { id: String, label: String },
    #[error("duplicate instance id {0:?}")]
    DuplicateId(String),
    #[error("instance {0}: missing gold label")]
    UnlabeledInstance(String),
    #[error("schema {schema}: {reason}")]
    InvalidSchema { schema: String, reason: String },
    #[error("unknown schema pack {0:?}")]
    UnknownSchema(String),
    #[error("unknown relation class {0:?}")]
    UnknownClass(String),
    #[error("exclusivity matrix: {0}")]
    InvalidMatrix(String),
    #[error("feasibility index: {0}")]
    InvalidIndex(String),
    #[error("adapt config: {0}")]
    Config(String),
    #[error("duplicate pair id {0:?}")]
    DuplicatePairId(String),
    #[error("pair {pair_id}: {reason}")]
    InvalidPrediction { pair_id: String, reason: String },
    #[error("pair id {0:?} does not end in a known relation class")]
    UnresolvablePairId(String),
    #[error("prediction group mixes instance ids {0:?} and {1:?}")]
    MixedInstanceIds(String, String),
    #[error("prediction group mixes probability and generated-text payloads")]
    MixedPayloads,
    #[error("empty prediction group")]
    EmptyGroup,
    #[error("prediction for unknown instance id {0:?}")]
    UnknownInstanceId(String),
    #[error("instance {id}: {source}")]
    InInstance {
        id: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::InInstance { source, .. } => source.kind(),
            _ => ErrorKind::Validation,
        }
    }

    /// Short stable identifier for machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MalformedLine { .. } => "malformed_line",
            Error::SpanOutOfBounds(_) => "span_out_of_bounds",
            Error::SpanMismatch { .. } => "span_mismatch",
            Error::OverlappingSpans(_) => "overlapping_spans",
            Error::SelfRelation(_) => "self_relation",
            Error::UnknownLabel { .. } => "unknown_label",
            Error::DuplicateId(_) => "duplicate_id",
            Error::UnlabeledInstance(_) => "unlabeled_instance",
            Error::InvalidSchema { .. } => "invalid_schema",
            Error::UnknownSchema(_) => "unknown_schema",
            Error::UnknownClass(_) => "unknown_class",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::InvalidIndex(_) => "invalid_index",
            Error::Config(_) => "config",
            Error::DuplicatePairId(_) => "duplicate_pair_id",
            Error::InvalidPrediction { .. } => "invalid_prediction",
            Error::UnresolvablePairId(_) => "unresolvable_pair_id",
            Error::MixedInstanceIds(..) => "mixed_instance_ids",
            Error::MixedPayloads => "mixed_payloads",
            Error::EmptyGroup => "empty_group",
            Error::UnknownInstanceId(_) => "unknown_instance_id",
            Error::InInstance { source, .. } => source.code(),
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
