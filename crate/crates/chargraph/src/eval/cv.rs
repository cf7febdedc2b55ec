//! Cross-validation harnesses and the evaluation report type.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::baseline::embedding_link_baseline;
use crate::eval::metrics::{macro_prf, roc_auc};
use crate::eval::split::edge_split;
use crate::gnn::{
    logistic_fit, logistic_predict, materialize_features, predict_classes, train_link_predictor,
    train_node_classifier, FeatureSource, GnnKind, LogisticConfig, TaskKind, TrainConfig,
};
use crate::graph::CharacterGraph;
use crate::util::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator); 0 for a single fold.
    pub sd: f64,
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MetricSummary { mean, sd }
}

/// Per-fold metrics plus aggregates for one method/feature cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskKind,
    pub method: String,
    pub feature_source: String,
    pub per_fold: Vec<BTreeMap<String, f64>>,
    pub aggregate: BTreeMap<String, MetricSummary>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn from_folds(
        task: TaskKind,
        method: &str,
        feature_source: &str,
        per_fold: Vec<BTreeMap<String, f64>>,
        config: serde_json::Value,
        seed: u64,
        warnings: Vec<String>,
    ) -> Self {
        let mut aggregate = BTreeMap::new();
        if let Some(first) = per_fold.first() {
            for key in first.keys() {
                let values: Vec<f64> = per_fold.iter().map(|f| f[key]).collect();
                aggregate.insert(key.clone(), summarize(&values));
            }
        }
        Self {
            task,
            method: method.to_string(),
            feature_source: feature_source.to_string(),
            per_fold,
            aggregate,
            config,
            seed,
            warnings,
        }
    }

    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.aggregate.get(metric).map(|s| s.mean)
    }
}

/// Stratified fold ids per node: members of each class are shuffled and
/// dealt round-robin with a running cursor, so fold sizes differ by at most
/// one overall.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Vec<usize> {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut fold_of = vec![0usize; labels.len()];
    let mut cursor = 0usize;
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, class as u64, 0xF01D));
        members.shuffle(&mut rng);
        for idx in members {
            fold_of[idx] = cursor % k;
            cursor += 1;
        }
    }
    fold_of
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnnHyper {
    pub epochs: usize,
    pub learning_rate: f64,
    pub hidden_dim: usize,
    pub weighted: bool,
}

impl GnnHyper {
    /// 5000 epochs at lr 1e-4, the classification defaults.
    pub fn classification_default() -> Self {
        Self {
            epochs: 5000,
            learning_rate: 1e-4,
            hidden_dim: 20,
            weighted: false,
        }
    }

    /// 15000 epochs at lr 1e-3, the link-prediction defaults.
    pub fn link_default() -> Self {
        Self {
            epochs: 15000,
            learning_rate: 1e-3,
            hidden_dim: 20,
            weighted: false,
        }
    }

    fn train_config(&self, model: GnnKind, seed: u64) -> TrainConfig {
        TrainConfig {
            model,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            hidden_dim: self.hidden_dim,
            weighted_adjacency: self.weighted,
            seed,
        }
    }
}

/// A node-classification model under evaluation.
pub enum NodeModel<'a> {
    Gnn {
        kind: GnnKind,
        features: FeatureSource<'a>,
        hyper: GnnHyper,
    },
    /// Logistic regression over fixed embedding features.
    Logistic {
        embedding: &'a EmbeddingMatrix,
        config: LogisticConfig,
    },
}

/// k-fold cross-validated node classification.
///
/// Fold assignment is stratified by class. GNNs always see the whole graph
/// topology; only held-out labels are masked (transductive).
pub fn kfold_node_cv(
    g: &CharacterGraph,
    model: &NodeModel,
    labels: &[usize],
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    if labels.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: g.node_count(),
        });
    }
    if k < 2 || k > labels.len() {
        return Err(Error::InvalidConfig(format!(
            "fold count {k} must lie in [2, {}]",
            labels.len()
        )));
    }
    let fold_of = stratified_folds(labels, k, seed);
    let n_classes = labels.iter().max().unwrap() + 1;
    let mut warnings = Vec::new();
    let mut per_fold = Vec::with_capacity(k);

    for fold in 0..k {
        let mask: Vec<bool> = fold_of.iter().map(|&f| f != fold).collect();
        let holdout: Vec<usize> = (0..labels.len()).filter(|&i| fold_of[i] == fold).collect();
        if holdout.is_empty() {
            continue;
        }
        for class in 0..n_classes {
            let in_train = labels
                .iter()
                .zip(&mask)
                .any(|(&l, &m)| m && l == class);
            if !in_train {
                warnings.push(format!("fold {fold}: class {class} absent from training"));
            }
        }
        let fold_seed = derive_seed(seed, fold as u64, 0xCF);
        let predictions: Vec<usize> = match model {
            NodeModel::Gnn {
                kind,
                features,
                hyper,
            } => {
                let config = hyper.train_config(*kind, fold_seed);
                let out = train_node_classifier(g, *features, labels, &mask, &config)?;
                holdout.iter().map(|&i| out.predictions[i]).collect()
            }
            NodeModel::Logistic { embedding, config } => {
                let features = materialize_features(g, FeatureSource::Embedding(embedding))?;
                let train_rows: Vec<Vec<f64>> = (0..labels.len())
                    .filter(|&i| mask[i])
                    .map(|i| features.row(i).to_vec())
                    .collect();
                let train_labels: Vec<usize> = (0..labels.len())
                    .filter(|&i| mask[i])
                    .map(|i| labels[i])
                    .collect();
                let fitted = logistic_fit(
                    &crate::linalg::DenseMatrix::from_rows(train_rows),
                    &train_labels,
                    config,
                )?;
                let test_rows: Vec<Vec<f64>> =
                    holdout.iter().map(|&i| features.row(i).to_vec()).collect();
                let probs =
                    logistic_predict(&fitted, &crate::linalg::DenseMatrix::from_rows(test_rows))?;
                predict_classes(&probs)
            }
        };
        let truth: Vec<usize> = holdout.iter().map(|&i| labels[i]).collect();
        let prf = macro_prf(&truth, &predictions)?;
        per_fold.push(BTreeMap::from([
            ("f1".to_string(), prf.f1),
            ("precision".to_string(), prf.precision),
            ("recall".to_string(), prf.recall),
        ]));
    }

    let (method, feature_source, config) = describe_node_model(model);
    Ok(EvalReport::from_folds(
        TaskKind::NodeClassification,
        &method,
        &feature_source,
        per_fold,
        config,
        seed,
        warnings,
    ))
}

fn describe_node_model(model: &NodeModel) -> (String, String, serde_json::Value) {
    match model {
        NodeModel::Gnn {
            kind,
            features,
            hyper,
        } => {
            let feature_source = match features {
                FeatureSource::OneHot => "ohe".to_string(),
                FeatureSource::Embedding(e) => {
                    serde_json::to_value(e.provenance).unwrap().as_str().unwrap().to_string()
                }
            };
            let method = match kind {
                GnnKind::Gcn => "gcn",
                GnnKind::Gat => "gat",
            };
            (
                method.to_string(),
                feature_source,
                serde_json::to_value(hyper).unwrap(),
            )
        }
        NodeModel::Logistic { embedding, config } => (
            "logistic".to_string(),
            serde_json::to_value(embedding.provenance)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string(),
            serde_json::to_value(config).unwrap(),
        ),
    }
}

/// Feature supply for link prediction, where graph embeddings must be
/// retrained on each training graph.
pub enum LinkFeatures<'a> {
    OneHot,
    /// Split-independent features (word embeddings trained on full text).
    Fixed(&'a EmbeddingMatrix),
    /// Rebuilt per split from the training graph.
    PerSplit(&'a dyn Fn(&CharacterGraph, u64) -> Result<EmbeddingMatrix>),
}

impl LinkFeatures<'_> {
    fn name(&self) -> String {
        match self {
            LinkFeatures::OneHot => "ohe".to_string(),
            LinkFeatures::Fixed(e) => serde_json::to_value(e.provenance)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string(),
            LinkFeatures::PerSplit(_) => "per_split".to_string(),
        }
    }
}

pub enum LinkModel<'a> {
    Gnn {
        kind: GnnKind,
        features: LinkFeatures<'a>,
        hyper: GnnHyper,
        output_dim: usize,
    },
    Logistic {
        features: LinkFeatures<'a>,
        config: LogisticConfig,
    },
}

/// Link prediction scored over `repeats` independent seeded holdout splits;
/// each repeat contributes one AUC.
pub fn repeated_link_eval(
    g: &CharacterGraph,
    model: &LinkModel,
    holdout_fraction: f64,
    repeats: usize,
    seed: u64,
) -> Result<EvalReport> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    let mut per_fold = Vec::with_capacity(repeats);
    let mut warnings = Vec::new();
    for repeat in 0..repeats {
        let split_seed = derive_seed(seed, repeat as u64, 0x5EED);
        let split = edge_split(g, holdout_fraction, split_seed)?;
        if !split.train_connected {
            warnings.push(format!("repeat {repeat}: training graph disconnected"));
        }
        let auc = match model {
            LinkModel::Gnn {
                kind,
                features,
                hyper,
                output_dim,
            } => {
                let embedding_holder;
                let feature_source = match features {
                    LinkFeatures::OneHot => FeatureSource::OneHot,
                    LinkFeatures::Fixed(e) => FeatureSource::Embedding(e),
                    LinkFeatures::PerSplit(build) => {
                        embedding_holder = build(&split.train_graph, split_seed)?;
                        FeatureSource::Embedding(&embedding_holder)
                    }
                };
                let config = hyper.train_config(*kind, derive_seed(seed, repeat as u64, 0x11));
                let predictor =
                    train_link_predictor(&split.train_graph, feature_source, *output_dim, &config)?;
                let mut scores = Vec::new();
                let mut truth = Vec::new();
                for (pairs, label) in [
                    (&split.test_positives, true),
                    (&split.test_negatives, false),
                ] {
                    for (u, v) in pairs {
                        let ui = split.train_graph.index_of(u).unwrap();
                        let vi = split.train_graph.index_of(v).unwrap();
                        scores.push(predictor.score(ui, vi));
                        truth.push(label);
                    }
                }
                roc_auc(&scores, &truth)?
            }
            LinkModel::Logistic { features, config } => {
                let embedding_holder;
                let embedding = match features {
                    LinkFeatures::Fixed(e) => *e,
                    LinkFeatures::PerSplit(build) => {
                        embedding_holder = build(&split.train_graph, split_seed)?;
                        &embedding_holder
                    }
                    LinkFeatures::OneHot => {
                        return Err(Error::InvalidConfig(
                            "one-hot features need a message-passing model".into(),
                        ))
                    }
                };
                embedding_link_baseline(
                    embedding,
                    &split.train_graph,
                    &split.test_positives,
                    &split.test_negatives,
                    config,
                    derive_seed(seed, repeat as u64, 0xB0),
                )?
            }
        };
        per_fold.push(BTreeMap::from([("auc".to_string(), auc)]));
    }
    let (method, feature_source, config) = match model {
        LinkModel::Gnn {
            kind,
            features,
            hyper,
            ..
        } => (
            match kind {
                GnnKind::Gcn => "gcn".to_string(),
                GnnKind::Gat => "gat".to_string(),
            },
            features.name(),
            serde_json::to_value(hyper).unwrap(),
        ),
        LinkModel::Logistic { features, config } => (
            "logistic".to_string(),
            features.name(),
            serde_json::to_value(config).unwrap(),
        ),
    };
    Ok(EvalReport::from_folds(
        TaskKind::LinkPrediction,
        &method,
        &feature_source,
        per_fold,
        config,
        seed,
        warnings,
    ))
}

/// Semi-supervised classification: train with exactly one labeled node per
/// class (seeded choice) and score macro-PRF on everything else.
pub fn semi_supervised_eval(
    g: &CharacterGraph,
    kind: GnnKind,
    features: FeatureSource,
    hyper: &GnnHyper,
    labels: &[usize],
    seed: u64,
) -> Result<crate::eval::metrics::MacroPrf> {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut mask = vec![false; labels.len()];
    for class in 0..n_classes {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            return Err(Error::InvalidConfig(format!("class {class} has no nodes")));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, class as u64, 0x3E));
        use rand::Rng;
        mask[members[rng.gen_range(0..members.len())]] = true;
    }
    let config = hyper.train_config(kind, derive_seed(seed, 0, 0x44));
    let out = train_node_classifier(g, features, labels, &mask, &config)?;
    let holdout: Vec<usize> = (0..labels.len()).filter(|&i| !mask[i]).collect();
    let truth: Vec<usize> = holdout.iter().map(|&i| labels[i]).collect();
    let predicted: Vec<usize> = holdout.iter().map(|&i| out.predictions[i]).collect();
    macro_prf(&truth, &predicted)
}
