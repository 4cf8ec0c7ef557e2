use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate edge {source_label} -> {target_label}")]
    DuplicateEdge {
        line: usize,
        source_label: String,
        target_label: String,
    },

    #[error("line {line}: self-loop on node {label}")]
    SelfLoop { line: usize, label: String },

    #[error("masking fraction {0} is outside [0, 1]")]
    InvalidFraction(f64),

    #[error("graph already contains hidden signs; a fully observed graph is required")]
    NotFullyObserved,

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("endpoints must differ (got {0} twice)")]
    SameEndpoints(NodeId),

    #[error("no edge {0} -> {1}")]
    EdgeNotFound(NodeId, NodeId),

    #[error("graph has no observed-sign edges")]
    NoObservedEdges,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("label {0} is not binary (expected 0 or 1)")]
    NonBinaryLabel(f64),

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("feature manifest mismatch: model expects {expected}, features are {actual}")]
    ManifestMismatch { expected: String, actual: String },

    #[error("unsupported model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
