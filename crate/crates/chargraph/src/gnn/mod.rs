//! Dense numerical core and graph neural networks: GCN and GAT message
//! passing, a logistic-regression head, the adaptive-moment optimizer, and
//! finite-difference gradient checking.

mod adam;
mod adjacency;
mod gat;
mod gcn;
mod gradcheck;
mod logistic;
mod training;

pub use crate::linalg::DenseMatrix;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use adjacency::normalize_adjacency;
pub use gat::{gat_backward, gat_forward, GatCache, GatParams, GatStructure};
pub use gcn::{gcn_backward, gcn_forward, GcnCache, GcnParams};
pub use gradcheck::{gradient_check, CheckModel};
pub use logistic::{
    cross_entropy, logistic_fit, logistic_predict, predict_classes, softmax_rows, LogisticConfig,
    LogisticModel,
};
pub use training::{
    link_bce, masked_cross_entropy, materialize_features, pair_score, sample_negative_pairs,
    train_link_predictor, train_node_classifier, FeatureSource, GnnKind, LinkPredictor,
    ModelParams, NodeClassifier, TaskKind, TrainConfig,
};
