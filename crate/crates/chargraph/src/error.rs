//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document '{work_id}' is not valid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { work_id: String, offset: usize },

    #[error("document '{work_id}' is empty")]
    EmptyDocument { work_id: String },

    #[error("no documents supplied")]
    NoDocuments,

    #[error("alias table has no entries")]
    EmptyAliasTable,

    #[error("alias '{alias}' maps to both '{first}' and '{second}'")]
    ConflictingAlias {
        alias: String,
        first: String,
        second: String,
    },

    #[error("unknown character id '{0}'")]
    UnknownCharacter(String),

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("edge list contains a self-loop on '{0}'")]
    SelfLoop(String),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("{metric} is undefined for a graph with {nodes} node(s)")]
    MetricUndefined { metric: &'static str, nodes: usize },

    #[error("embedding dimension {dim} must be smaller than node count {nodes}")]
    DimensionTooLarge { dim: usize, nodes: usize },

    #[error("vocabulary is empty after applying min count {min_count}")]
    EmptyVocabulary { min_count: usize },

    #[error("embedding has no vector for '{0}'")]
    MissingVector(String),

    #[error("projection requires at least 2 entities, got {0}")]
    TooFewEntities(usize),

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: String,
        expected: String,
        actual: String,
    },

    #[error("non-finite gradient in parameter '{0}'")]
    NonFiniteGradient(String),

    #[error("training mask is empty")]
    EmptyMask,

    #[error("training labels contain a single class '{0}'")]
    SingleClass(String),

    #[error("training graph has no edges")]
    NoEdges,

    #[error("character '{0}' has no mentions")]
    ZeroMentions(String),

    #[error("label vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("scores contain a single label class")]
    SingleLabelClass,

    #[error("holdout of {requested} edges exceeds the {available} available")]
    HoldoutTooLarge { requested: usize, available: usize },

    #[error("invalid holdout fraction {0}; must lie in (0, 1)")]
    InvalidHoldout(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing artifact '{path}'; run the '{stage}' stage first")]
    MissingArtifact { path: String, stage: String },

    #[error("malformed {format} input: {detail}")]
    MalformedInput { format: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
