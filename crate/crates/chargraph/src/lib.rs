//! Character co-occurrence networks from literary text.
//!
//! The crate covers the full pipeline: corpus ingestion and segmentation,
//! alias-based character mention extraction, co-occurrence edge lists,
//! weighted character graphs with social-network metrics, latent-space
//! embeddings (skipgram, node2vec, Laplacian eigenmaps), graph neural
//! networks (GCN and GAT) for character classification and co-occurrence
//! prediction, and the evaluation harness that scores them.
//!
//! Stages hand off through serializable types (`TokenizedCorpus`,
//! `MentionRecord`, `EdgeList`, `CharacterGraph`, `EmbeddingMatrix`,
//! `EvalReport`), and every random choice flows from an explicit seed.

pub mod characters;
pub mod cooccur;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod gnn;
pub mod graph;
pub mod linalg;
pub(crate) mod util;

pub use error::{Error, Result};
