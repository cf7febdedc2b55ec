//! Evaluation harness: labels, splits, cross-validation, metrics, baselines,
//! the synthetic benchmark, and the experiment grid driver.

mod baseline;
mod benchmark;
mod cv;
mod experiment;
mod labels;
mod metrics;
mod split;

pub use baseline::{embedding_link_baseline, hadamard_feature};
pub use benchmark::{benchmark_corpus, planted_partition, PlantedBenchmark, PlantedConfig};
pub use cv::{
    kfold_node_cv, repeated_link_eval, semi_supervised_eval, stratified_folds, summarize,
    EvalReport, GnnHyper, LinkFeatures, LinkModel, MetricSummary, NodeModel,
};
pub use experiment::{
    reports_to_csv, run_experiment, ExperimentArtifacts, ExperimentConfig, FeatureKind, GridCell,
    MethodKind,
};
pub use labels::{derive_labels, LabelAssignment};
pub use metrics::{macro_prf, roc_auc, roc_auc_trapezoid, roc_curve, MacroPrf};
pub use split::{edge_split, EdgeSplit};
