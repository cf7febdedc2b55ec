//! Grid experiment driver: method x feature-source x task, one report per
//! cell plus a combined results table.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::characters::MentionRecord;
use crate::corpus::TokenizedCorpus;
use crate::embed::{
    laplacian_eigenmap, node2vec, word_embeddings, EmbeddingMatrix, Node2vecConfig, WalkConfig,
    WordEmbeddingConfig,
};
use crate::error::{Error, Result};
use crate::eval::cv::{
    kfold_node_cv, repeated_link_eval, EvalReport, GnnHyper, LinkFeatures, LinkModel, NodeModel,
};
use crate::gnn::{FeatureSource, GnnKind, LogisticConfig, TaskKind};
use crate::graph::CharacterGraph;
use crate::util::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Gcn,
    Gat,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Ohe,
    Node2vec,
    WordContext,
    LaplacianEigenmap,
}

/// One grid cell; `p`/`q` override the node2vec walk bias for this cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCell {
    pub method: MethodKind,
    pub features: FeatureKind,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub tasks: Vec<TaskKind>,
    pub cells: Vec<GridCell>,
    pub k_folds: usize,
    pub link_holdout: f64,
    pub link_repeats: usize,
    pub seed: u64,
    pub classification: GnnHyper,
    pub link: GnnHyper,
    pub link_output_dim: usize,
    pub logistic: LogisticConfig,
    pub walks: WalkConfig,
    pub node2vec: Node2vecConfig,
    pub eigenmap_dim: usize,
    pub eigenmap_weighted: bool,
    pub word: WordEmbeddingConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tasks: vec![TaskKind::NodeClassification, TaskKind::LinkPrediction],
            cells: vec![
                GridCell { method: MethodKind::Logistic, features: FeatureKind::WordContext, p: None, q: None },
                GridCell { method: MethodKind::Logistic, features: FeatureKind::LaplacianEigenmap, p: None, q: None },
                GridCell { method: MethodKind::Logistic, features: FeatureKind::Node2vec, p: Some(1.0), q: Some(4.0) },
                GridCell { method: MethodKind::Logistic, features: FeatureKind::Node2vec, p: Some(4.0), q: Some(1.0) },
                GridCell { method: MethodKind::Logistic, features: FeatureKind::Node2vec, p: Some(1.0), q: Some(1.0) },
                GridCell { method: MethodKind::Gcn, features: FeatureKind::LaplacianEigenmap, p: None, q: None },
                GridCell { method: MethodKind::Gcn, features: FeatureKind::Node2vec, p: Some(1.0), q: Some(1.0) },
                GridCell { method: MethodKind::Gcn, features: FeatureKind::Ohe, p: None, q: None },
                GridCell { method: MethodKind::Gcn, features: FeatureKind::WordContext, p: None, q: None },
                GridCell { method: MethodKind::Gat, features: FeatureKind::LaplacianEigenmap, p: None, q: None },
                GridCell { method: MethodKind::Gat, features: FeatureKind::Node2vec, p: Some(1.0), q: Some(1.0) },
                GridCell { method: MethodKind::Gat, features: FeatureKind::Ohe, p: None, q: None },
                GridCell { method: MethodKind::Gat, features: FeatureKind::WordContext, p: None, q: None },
            ],
            k_folds: 10,
            link_holdout: 0.1,
            link_repeats: 10,
            seed: 1,
            classification: GnnHyper::classification_default(),
            link: GnnHyper::link_default(),
            link_output_dim: 20,
            logistic: LogisticConfig::default(),
            walks: WalkConfig::default(),
            node2vec: Node2vecConfig::default(),
            eigenmap_dim: 20,
            eigenmap_weighted: false,
            word: WordEmbeddingConfig::default(),
        }
    }
}

/// Prebuilt pipeline artifacts the experiment runs against.
pub struct ExperimentArtifacts<'a> {
    pub graph: &'a CharacterGraph,
    /// Class index per graph node.
    pub labels: &'a [usize],
    pub corpus: Option<&'a TokenizedCorpus>,
    pub mentions: Option<&'a [MentionRecord]>,
}

fn cell_feature_label(cell: &GridCell) -> String {
    match cell.features {
        FeatureKind::Ohe => "ohe".to_string(),
        FeatureKind::WordContext => "word_context".to_string(),
        FeatureKind::LaplacianEigenmap => "laplacian_eigenmap".to_string(),
        FeatureKind::Node2vec => format!(
            "node2vec(p={},q={})",
            cell.p.unwrap_or(1.0),
            cell.q.unwrap_or(1.0)
        ),
    }
}

fn cell_method_label(cell: &GridCell) -> &'static str {
    match cell.method {
        MethodKind::Gcn => "gcn",
        MethodKind::Gat => "gat",
        MethodKind::Logistic => "logistic",
    }
}

struct EmbeddingBank {
    node2vec: BTreeMap<(u64, u64), EmbeddingMatrix>,
    eigenmap: Option<EmbeddingMatrix>,
    word: Option<EmbeddingMatrix>,
}

impl EmbeddingBank {
    fn new() -> Self {
        Self {
            node2vec: BTreeMap::new(),
            eigenmap: None,
            word: None,
        }
    }
}

fn pq_key(cell: &GridCell) -> (u64, u64) {
    (
        cell.p.unwrap_or(1.0).to_bits(),
        cell.q.unwrap_or(1.0).to_bits(),
    )
}

fn word_embedding(
    artifacts: &ExperimentArtifacts,
    config: &ExperimentConfig,
) -> Result<EmbeddingMatrix> {
    let corpus = artifacts.corpus.ok_or_else(|| Error::MissingArtifact {
        path: "corpus".into(),
        stage: "ingest".into(),
    })?;
    let result = word_embeddings(corpus, artifacts.mentions, &config.word)?;
    Ok(result.embedding)
}

/// Runs every `task x cell` combination and returns one report per cell.
pub fn run_experiment(
    artifacts: &ExperimentArtifacts,
    config: &ExperimentConfig,
) -> Result<Vec<EvalReport>> {
    let g = artifacts.graph;
    let mut bank = EmbeddingBank::new();
    let mut reports = Vec::new();

    for task in &config.tasks {
        for cell in &config.cells {
            let mut report = match task {
                TaskKind::NodeClassification => {
                    // Full-graph embeddings, cached across cells.
                    let embedding: Option<&EmbeddingMatrix> = match cell.features {
                        FeatureKind::Ohe => None,
                        FeatureKind::Node2vec => {
                            let key = pq_key(cell);
                            if !bank.node2vec.contains_key(&key) {
                                let walk_config = WalkConfig {
                                    p: cell.p.unwrap_or(1.0),
                                    q: cell.q.unwrap_or(1.0),
                                    ..config.walks.clone()
                                };
                                let result = node2vec(g, &walk_config, &config.node2vec)?;
                                bank.node2vec.insert(key, result.embedding);
                            }
                            Some(&bank.node2vec[&key])
                        }
                        FeatureKind::LaplacianEigenmap => {
                            if bank.eigenmap.is_none() {
                                bank.eigenmap = Some(
                                    laplacian_eigenmap(
                                        g,
                                        config.eigenmap_dim,
                                        config.eigenmap_weighted,
                                    )?
                                    .embedding,
                                );
                            }
                            bank.eigenmap.as_ref()
                        }
                        FeatureKind::WordContext => {
                            if bank.word.is_none() {
                                bank.word = Some(word_embedding(artifacts, config)?);
                            }
                            bank.word.as_ref()
                        }
                    };
                    let model = match cell.method {
                        MethodKind::Logistic => {
                            let embedding = embedding.ok_or_else(|| {
                                Error::InvalidConfig(
                                    "logistic regression needs embedding features".into(),
                                )
                            })?;
                            NodeModel::Logistic {
                                embedding,
                                config: config.logistic.clone(),
                            }
                        }
                        MethodKind::Gcn | MethodKind::Gat => NodeModel::Gnn {
                            kind: if cell.method == MethodKind::Gcn {
                                GnnKind::Gcn
                            } else {
                                GnnKind::Gat
                            },
                            features: embedding
                                .map(FeatureSource::Embedding)
                                .unwrap_or(FeatureSource::OneHot),
                            hyper: config.classification.clone(),
                        },
                    };
                    kfold_node_cv(g, &model, artifacts.labels, config.k_folds, config.seed)?
                }
                TaskKind::LinkPrediction => {
                    let walk_config = WalkConfig {
                        p: cell.p.unwrap_or(1.0),
                        q: cell.q.unwrap_or(1.0),
                        ..config.walks.clone()
                    };
                    let n2v_config = config.node2vec.clone();
                    let eigen_dim = config.eigenmap_dim;
                    let eigen_weighted = config.eigenmap_weighted;
                    let build_node2vec = move |g_train: &CharacterGraph,
                                               split_seed: u64|
                          -> Result<EmbeddingMatrix> {
                        let walk_config = WalkConfig {
                            seed: derive_seed(split_seed, 0, 0xE1),
                            ..walk_config.clone()
                        };
                        Ok(node2vec(g_train, &walk_config, &n2v_config)?.embedding)
                    };
                    let build_eigenmap = move |g_train: &CharacterGraph,
                                               _split_seed: u64|
                          -> Result<EmbeddingMatrix> {
                        let result = laplacian_eigenmap(g_train, eigen_dim, eigen_weighted)?;
                        // Nodes outside the largest component get zero rows.
                        Ok(crate::embed::pad_missing(
                            &result.embedding,
                            g_train.nodes(),
                        ))
                    };
                    let features = match cell.features {
                        FeatureKind::Ohe => LinkFeatures::OneHot,
                        FeatureKind::Node2vec => LinkFeatures::PerSplit(&build_node2vec),
                        FeatureKind::LaplacianEigenmap => LinkFeatures::PerSplit(&build_eigenmap),
                        FeatureKind::WordContext => {
                            if bank.word.is_none() {
                                bank.word = Some(word_embedding(artifacts, config)?);
                            }
                            LinkFeatures::Fixed(bank.word.as_ref().unwrap())
                        }
                    };
                    let model = match cell.method {
                        MethodKind::Logistic => LinkModel::Logistic {
                            features,
                            config: config.logistic.clone(),
                        },
                        MethodKind::Gcn | MethodKind::Gat => LinkModel::Gnn {
                            kind: if cell.method == MethodKind::Gcn {
                                GnnKind::Gcn
                            } else {
                                GnnKind::Gat
                            },
                            features,
                            hyper: config.link.clone(),
                            output_dim: config.link_output_dim,
                        },
                    };
                    repeated_link_eval(
                        g,
                        &model,
                        config.link_holdout,
                        config.link_repeats,
                        config.seed,
                    )?
                }
            };
            report.method = cell_method_label(cell).to_string();
            report.feature_source = cell_feature_label(cell);
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Combined results table, one row per report.
pub fn reports_to_csv<W: Write>(reports: &[EvalReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "task",
        "method",
        "features",
        "f1_mean",
        "f1_sd",
        "precision_mean",
        "precision_sd",
        "recall_mean",
        "recall_sd",
        "auc_mean",
        "auc_sd",
    ])?;
    for report in reports {
        let cell = |metric: &str, which: bool| -> String {
            report
                .aggregate
                .get(metric)
                .map(|s| format!("{}", if which { s.mean } else { s.sd }))
                .unwrap_or_default()
        };
        let task = match report.task {
            TaskKind::NodeClassification => "classification",
            TaskKind::LinkPrediction => "link_prediction",
        };
        w.write_record([
            task,
            &report.method,
            &report.feature_source,
            &cell("f1", true),
            &cell("f1", false),
            &cell("precision", true),
            &cell("precision", false),
            &cell("recall", true),
            &cell("recall", false),
            &cell("auc", true),
            &cell("auc", false),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::benchmark::{planted_partition, PlantedConfig};

    fn small_benchmark() -> (CharacterGraph, Vec<usize>) {
        let config = PlantedConfig {
            blocks: 2,
            block_size: 10,
            p_intra: 0.5,
            p_inter: 0.03,
            seed: 5,
            ensure_connected: true,
        };
        let b = planted_partition(&config).unwrap();
        (b.graph, b.labels)
    }

    fn quick_config() -> ExperimentConfig {
        ExperimentConfig {
            tasks: vec![TaskKind::NodeClassification],
            cells: vec![
                GridCell {
                    method: MethodKind::Gcn,
                    features: FeatureKind::Ohe,
                    p: None,
                    q: None,
                },
                GridCell {
                    method: MethodKind::Logistic,
                    features: FeatureKind::Node2vec,
                    p: Some(1.0),
                    q: Some(1.0),
                },
            ],
            k_folds: 4,
            link_repeats: 2,
            classification: GnnHyper {
                epochs: 100,
                learning_rate: 0.02,
                hidden_dim: 8,
                weighted: false,
            },
            walks: WalkConfig {
                walks_per_node: 4,
                walk_length: 20,
                ..Default::default()
            },
            node2vec: Node2vecConfig {
                dim: 8,
                window: 4,
                epochs: 2,
                ..Default::default()
            },
            eigenmap_dim: 6,
            ..Default::default()
        }
    }

    #[test]
    fn grid_emits_one_report_per_cell() {
        let (g, labels) = small_benchmark();
        let artifacts = ExperimentArtifacts {
            graph: &g,
            labels: &labels,
            corpus: None,
            mentions: None,
        };
        let reports = run_experiment(&artifacts, &quick_config()).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].method, "gcn");
        assert_eq!(reports[1].feature_source, "node2vec(p=1,q=1)");

        let mut buf = Vec::new();
        reports_to_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("classification,gcn,ohe"));
    }

    #[test]
    fn rerun_with_same_seed_is_identical() {
        let (g, labels) = small_benchmark();
        let artifacts = ExperimentArtifacts {
            graph: &g,
            labels: &labels,
            corpus: None,
            mentions: None,
        };
        let config = quick_config();
        let a = run_experiment(&artifacts, &config).unwrap();
        let b = run_experiment(&artifacts, &config).unwrap();
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        reports_to_csv(&a, &mut csv_a).unwrap();
        reports_to_csv(&b, &mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn word_features_without_corpus_name_the_missing_stage() {
        let (g, labels) = small_benchmark();
        let artifacts = ExperimentArtifacts {
            graph: &g,
            labels: &labels,
            corpus: None,
            mentions: None,
        };
        let mut config = quick_config();
        config.cells = vec![GridCell {
            method: MethodKind::Logistic,
            features: FeatureKind::WordContext,
            p: None,
            q: None,
        }];
        let err = run_experiment(&artifacts, &config).unwrap_err();
        assert!(err.to_string().contains("ingest"), "{err}");
    }
}
