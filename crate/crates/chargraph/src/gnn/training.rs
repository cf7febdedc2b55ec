//! Training loops for node classification and link prediction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingMatrix, Provenance};
use crate::error::{Error, Result};
use crate::gnn::adam::{adam_step, AdamConfig, AdamState};
use crate::gnn::adjacency::normalize_adjacency;
use crate::gnn::gat::{gat_backward, gat_forward, GatParams, GatStructure};
use crate::gnn::gcn::{gcn_backward, gcn_forward, GcnParams};
use crate::gnn::logistic::{predict_classes, softmax_rows};
use crate::graph::CharacterGraph;
use crate::linalg::DenseMatrix;
use crate::util::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GnnKind {
    Gcn,
    Gat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    NodeClassification,
    LinkPrediction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: GnnKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub hidden_dim: usize,
    pub weighted_adjacency: bool,
    pub seed: u64,
}

impl TrainConfig {
    /// Node-classification defaults: 5000 epochs at lr 1e-4.
    pub fn classification(model: GnnKind, seed: u64) -> Self {
        Self {
            model,
            epochs: 5000,
            learning_rate: 1e-4,
            hidden_dim: 20,
            weighted_adjacency: false,
            seed,
        }
    }

    /// Link-prediction defaults: 15000 epochs at lr 1e-3.
    pub fn link_prediction(model: GnnKind, seed: u64) -> Self {
        Self {
            model,
            epochs: 15000,
            learning_rate: 1e-3,
            hidden_dim: 20,
            weighted_adjacency: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.learning_rate <= 0.0 || self.hidden_dim == 0 {
            return Err(Error::InvalidConfig(
                "epochs, learning_rate, and hidden_dim must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Node feature matrix: an identity one-hot encoding or an embedding.
#[derive(Debug, Clone, Copy)]
pub enum FeatureSource<'a> {
    OneHot,
    Embedding(&'a EmbeddingMatrix),
}

/// Rows aligned with graph node order; errors on nodes the embedding lacks.
pub fn materialize_features(g: &CharacterGraph, source: FeatureSource) -> Result<DenseMatrix> {
    match source {
        FeatureSource::OneHot => Ok(DenseMatrix::identity(g.node_count())),
        FeatureSource::Embedding(embedding) => {
            let mut rows = Vec::with_capacity(g.node_count());
            for id in g.nodes() {
                let row = embedding
                    .vector(id)
                    .ok_or_else(|| Error::MissingVector(id.clone()))?;
                rows.push(row.to_vec());
            }
            Ok(DenseMatrix::from_rows(rows))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    Gcn(GcnParams),
    Gat(GatParams),
}

/// Mean softmax cross-entropy over masked nodes and its logits gradient.
pub fn masked_cross_entropy(
    logits: &DenseMatrix,
    labels: &[usize],
    mask: &[bool],
) -> (f64, DenseMatrix) {
    let probs = softmax_rows(logits);
    let count = mask.iter().filter(|m| **m).count().max(1) as f64;
    let mut grad = DenseMatrix::zeros(logits.rows(), logits.cols());
    let mut loss = 0.0;
    for i in 0..logits.rows() {
        if !mask[i] {
            continue;
        }
        loss -= probs.get(i, labels[i]).max(1e-300).ln();
        for j in 0..logits.cols() {
            let target = if j == labels[i] { 1.0 } else { 0.0 };
            grad.set(i, j, (probs.get(i, j) - target) / count);
        }
    }
    (loss / count, grad)
}

/// Hadamard-decoder logit for a node pair: the dot product of final-layer
/// vectors, symmetric in its arguments.
pub fn pair_score(z: &DenseMatrix, u: usize, v: usize) -> f64 {
    z.row(u).iter().zip(z.row(v)).map(|(a, b)| a * b).sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Binary cross-entropy with logits over labeled pairs; returns the loss and
/// the gradient w.r.t. the node-vector matrix.
pub fn link_bce(
    z: &DenseMatrix,
    pairs: &[(usize, usize, f64)],
) -> (f64, DenseMatrix) {
    let n = pairs.len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = DenseMatrix::zeros(z.rows(), z.cols());
    for &(u, v, label) in pairs {
        let score = pair_score(z, u, v);
        let p = sigmoid(score);
        loss -= if label > 0.5 {
            p.max(1e-300).ln()
        } else {
            (1.0 - p).max(1e-300).ln()
        };
        let g = (p - label) / n;
        for j in 0..z.cols() {
            grad.add_to(u, j, g * z.get(v, j));
            grad.add_to(v, j, g * z.get(u, j));
        }
    }
    (loss / n, grad)
}

enum Engine {
    Gcn {
        params: GcnParams,
        norm_adj: DenseMatrix,
        states: Vec<AdamState>,
    },
    Gat {
        params: GatParams,
        structure: GatStructure,
        states: Vec<AdamState>,
    },
}

struct Forward {
    hidden: DenseMatrix,
    output: DenseMatrix,
}

impl Engine {
    fn new(g: &CharacterGraph, config: &TrainConfig, in_dim: usize, out_dim: usize) -> Self {
        match config.model {
            GnnKind::Gcn => {
                let params = GcnParams::init(in_dim, config.hidden_dim, out_dim, config.seed);
                let states = vec![
                    AdamState::new(params.w0.values().len()),
                    AdamState::new(params.b0.len()),
                    AdamState::new(params.w1.values().len()),
                    AdamState::new(params.b1.len()),
                ];
                Engine::Gcn {
                    params,
                    norm_adj: normalize_adjacency(g, config.weighted_adjacency),
                    states,
                }
            }
            GnnKind::Gat => {
                let params = GatParams::init(in_dim, config.hidden_dim, out_dim, config.seed);
                let states = [&params.layer0, &params.layer1]
                    .iter()
                    .flat_map(|layer| {
                        [
                            AdamState::new(layer.w.values().len()),
                            AdamState::new(layer.a_src.len()),
                            AdamState::new(layer.a_dst.len()),
                            AdamState::new(layer.b.len()),
                        ]
                    })
                    .collect();
                Engine::Gat {
                    params,
                    structure: GatStructure::new(g, config.weighted_adjacency),
                    states,
                }
            }
        }
    }

    fn forward(&self, features: &DenseMatrix) -> Result<Forward> {
        match self {
            Engine::Gcn {
                params, norm_adj, ..
            } => {
                let cache = gcn_forward(params, features, norm_adj)?;
                Ok(Forward {
                    hidden: cache.hidden,
                    output: cache.output,
                })
            }
            Engine::Gat {
                params, structure, ..
            } => {
                let cache = gat_forward(params, features, structure)?;
                Ok(Forward {
                    hidden: cache.layer0.out.clone(),
                    output: cache.layer1.out.clone(),
                })
            }
        }
    }

    fn backward_and_step(
        &mut self,
        features: &DenseMatrix,
        d_output: &DenseMatrix,
        adam: &AdamConfig,
    ) -> Result<()> {
        match self {
            Engine::Gcn {
                params,
                norm_adj,
                states,
            } => {
                let cache = gcn_forward(params, features, norm_adj)?;
                let grads = gcn_backward(params, features, norm_adj, &cache, d_output)?;
                adam_step("w0", params.w0.values_mut(), grads.w0.values(), &mut states[0], adam)?;
                adam_step("b0", &mut params.b0, &grads.b0, &mut states[1], adam)?;
                adam_step("w1", params.w1.values_mut(), grads.w1.values(), &mut states[2], adam)?;
                adam_step("b1", &mut params.b1, &grads.b1, &mut states[3], adam)?;
            }
            Engine::Gat {
                params,
                structure,
                states,
            } => {
                let cache = gat_forward(params, features, structure)?;
                let grads = gat_backward(params, features, structure, &cache, d_output)?;
                let mut k = 0;
                for (layer, glayer) in [
                    (&mut params.layer0, &grads.layer0),
                    (&mut params.layer1, &grads.layer1),
                ] {
                    adam_step("w", layer.w.values_mut(), glayer.w.values(), &mut states[k], adam)?;
                    adam_step("a_src", &mut layer.a_src, &glayer.a_src, &mut states[k + 1], adam)?;
                    adam_step("a_dst", &mut layer.a_dst, &glayer.a_dst, &mut states[k + 2], adam)?;
                    adam_step("b", &mut layer.b, &glayer.b, &mut states[k + 3], adam)?;
                    k += 4;
                }
            }
        }
        Ok(())
    }

    fn into_params(self) -> ModelParams {
        match self {
            Engine::Gcn { params, .. } => ModelParams::Gcn(params),
            Engine::Gat { params, .. } => ModelParams::Gat(params),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodeClassifier {
    pub params: ModelParams,
    /// Argmax class per node, graph node order.
    pub predictions: Vec<usize>,
    pub probabilities: DenseMatrix,
    /// Post-first-layer activations, exportable for plots.
    pub hidden: EmbeddingMatrix,
    pub epoch_losses: Vec<f64>,
}

/// Trains a GNN classifier; the loss sees only train-masked nodes while the
/// graph topology stays fully visible (transductive).
pub fn train_node_classifier(
    g: &CharacterGraph,
    features: FeatureSource,
    labels: &[usize],
    train_mask: &[bool],
    config: &TrainConfig,
) -> Result<NodeClassifier> {
    config.validate()?;
    let n = g.node_count();
    if labels.len() != n || train_mask.len() != n {
        return Err(Error::LengthMismatch {
            left: labels.len().max(train_mask.len()),
            right: n,
        });
    }
    if !train_mask.iter().any(|m| *m) {
        return Err(Error::EmptyMask);
    }
    {
        let masked: std::collections::BTreeSet<usize> = labels
            .iter()
            .zip(train_mask)
            .filter(|(_, m)| **m)
            .map(|(l, _)| *l)
            .collect();
        if masked.len() < 2 {
            return Err(Error::SingleClass(
                masked.first().map_or_else(String::new, |l| l.to_string()),
            ));
        }
    }
    let n_classes = labels.iter().max().unwrap() + 1;
    let x = materialize_features(g, features)?;
    let mut engine = Engine::new(g, config, x.cols(), n_classes);
    let adam = AdamConfig::with_lr(config.learning_rate);

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let fwd = engine.forward(&x)?;
        let (loss, d_out) = masked_cross_entropy(&fwd.output, labels, train_mask);
        if !loss.is_finite() {
            return Err(Error::NonFiniteGradient("loss".into()));
        }
        epoch_losses.push(loss);
        engine.backward_and_step(&x, &d_out, &adam)?;
    }

    let fwd = engine.forward(&x)?;
    let probabilities = softmax_rows(&fwd.output);
    let predictions = predict_classes(&probabilities);
    let hidden = EmbeddingMatrix::new(
        g.nodes().to_vec(),
        fwd.hidden,
        Provenance::GnnHidden,
        serde_json::to_value(config)?,
    );
    Ok(NodeClassifier {
        params: engine.into_params(),
        predictions,
        probabilities,
        hidden,
        epoch_losses,
    })
}

#[derive(Debug, Clone)]
pub struct LinkPredictor {
    pub params: ModelParams,
    /// Final-layer node vectors; pair logits are row dot products.
    pub node_vectors: DenseMatrix,
    pub hidden: EmbeddingMatrix,
    pub epoch_losses: Vec<f64>,
}

impl LinkPredictor {
    pub fn score(&self, u: usize, v: usize) -> f64 {
        pair_score(&self.node_vectors, u, v)
    }
}

/// Samples `count` non-edges of `g` (unordered, no self-pairs).
pub fn sample_negative_pairs(
    g: &CharacterGraph,
    count: usize,
    rng: &mut ChaCha20Rng,
) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut pairs = Vec::with_capacity(count);
    let mut guard = 0usize;
    while pairs.len() < count && guard < count * 1000 {
        guard += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let (u, v) = (u.min(v), u.max(v));
        if g.has_edge(u, v) {
            continue;
        }
        pairs.push((u, v));
    }
    pairs
}

/// Trains a GNN link predictor against the training graph's edges and
/// freshly sampled 1:1 negatives each epoch.
pub fn train_link_predictor(
    g_train: &CharacterGraph,
    features: FeatureSource,
    output_dim: usize,
    config: &TrainConfig,
) -> Result<LinkPredictor> {
    config.validate()?;
    let positives: Vec<(usize, usize)> = g_train.edges().map(|(u, v, _)| (u, v)).collect();
    if positives.is_empty() {
        return Err(Error::NoEdges);
    }
    let x = materialize_features(g_train, features)?;
    let mut engine = Engine::new(g_train, config, x.cols(), output_dim);
    let adam = AdamConfig::with_lr(config.learning_rate);

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut rng =
            ChaCha20Rng::seed_from_u64(derive_seed(config.seed, epoch as u64, 0xBEEF));
        let negatives = sample_negative_pairs(g_train, positives.len(), &mut rng);
        let pairs: Vec<(usize, usize, f64)> = positives
            .iter()
            .map(|&(u, v)| (u, v, 1.0))
            .chain(negatives.into_iter().map(|(u, v)| (u, v, 0.0)))
            .collect();
        let fwd = engine.forward(&x)?;
        let (loss, d_z) = link_bce(&fwd.output, &pairs);
        if !loss.is_finite() {
            return Err(Error::NonFiniteGradient("loss".into()));
        }
        epoch_losses.push(loss);
        engine.backward_and_step(&x, &d_z, &adam)?;
    }

    let fwd = engine.forward(&x)?;
    let hidden = EmbeddingMatrix::new(
        g_train.nodes().to_vec(),
        fwd.hidden,
        Provenance::GnnHidden,
        serde_json::to_value(config)?,
    );
    Ok(LinkPredictor {
        params: engine.into_params(),
        node_vectors: fwd.output,
        hidden,
        epoch_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques_with_bridge() -> (CharacterGraph, Vec<usize>) {
        let mut edges = Vec::new();
        let names: Vec<String> = (0..10).map(|i| format!("n{i:02}")).collect();
        for block in 0..2 {
            let lo = block * 5;
            for i in lo..lo + 5 {
                for j in (i + 1)..lo + 5 {
                    edges.push((names[i].clone(), names[j].clone(), 1u64));
                }
            }
        }
        edges.push((names[0].clone(), names[5].clone(), 1));
        let g = CharacterGraph::from_weighted_edges(edges).unwrap();
        let labels: Vec<usize> = g
            .nodes()
            .iter()
            .map(|id| if id < &"n05".to_string() { 0 } else { 1 })
            .collect();
        (g, labels)
    }

    #[test]
    fn gcn_classifier_learns_two_cliques() {
        let (g, labels) = two_cliques_with_bridge();
        let mask = vec![true; 10];
        let config = TrainConfig {
            model: GnnKind::Gcn,
            epochs: 300,
            learning_rate: 0.01,
            hidden_dim: 8,
            weighted_adjacency: false,
            seed: 3,
        };
        let out = train_node_classifier(&g, FeatureSource::OneHot, &labels, &mask, &config)
            .unwrap();
        assert_eq!(out.predictions, labels);
        assert!(out.epoch_losses.last().unwrap() < out.epoch_losses.first().unwrap());
        assert_eq!(out.hidden.dim, 8);
    }

    #[test]
    fn gat_classifier_learns_two_cliques() {
        let (g, labels) = two_cliques_with_bridge();
        let mask = vec![true; 10];
        let config = TrainConfig {
            model: GnnKind::Gat,
            epochs: 300,
            learning_rate: 0.01,
            hidden_dim: 8,
            weighted_adjacency: false,
            seed: 3,
        };
        let out = train_node_classifier(&g, FeatureSource::OneHot, &labels, &mask, &config)
            .unwrap();
        assert_eq!(out.predictions, labels);
    }

    #[test]
    fn masked_loss_ignores_unmasked_nodes() {
        let (g, labels) = two_cliques_with_bridge();
        let mut wrong = labels.clone();
        wrong[3] = 1 - wrong[3];
        let mut mask = vec![true; 10];
        mask[3] = false;
        // Training with node 3 masked out and mislabeled must behave as if
        // its label were irrelevant.
        let config = TrainConfig {
            model: GnnKind::Gcn,
            epochs: 50,
            learning_rate: 0.01,
            hidden_dim: 4,
            weighted_adjacency: false,
            seed: 1,
        };
        let a = train_node_classifier(&g, FeatureSource::OneHot, &labels, &mask, &config).unwrap();
        let b = train_node_classifier(&g, FeatureSource::OneHot, &wrong, &mask, &config).unwrap();
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }

    #[test]
    fn empty_mask_and_single_class_are_errors() {
        let (g, labels) = two_cliques_with_bridge();
        let config = TrainConfig::classification(GnnKind::Gcn, 1);
        assert!(matches!(
            train_node_classifier(&g, FeatureSource::OneHot, &labels, &[false; 10], &config),
            Err(Error::EmptyMask)
        ));
        let mut one_class_mask = vec![false; 10];
        one_class_mask[0] = true;
        one_class_mask[1] = true;
        assert!(matches!(
            train_node_classifier(&g, FeatureSource::OneHot, &labels, &one_class_mask, &config),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn same_seed_reproduces_parameters_bitwise() {
        let (g, labels) = two_cliques_with_bridge();
        let mask = vec![true; 10];
        let config = TrainConfig {
            model: GnnKind::Gcn,
            epochs: 40,
            learning_rate: 0.01,
            hidden_dim: 4,
            weighted_adjacency: false,
            seed: 77,
        };
        let a = train_node_classifier(&g, FeatureSource::OneHot, &labels, &mask, &config).unwrap();
        let b = train_node_classifier(&g, FeatureSource::OneHot, &labels, &mask, &config).unwrap();
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn link_scores_are_symmetric() {
        let (g, _) = two_cliques_with_bridge();
        let config = TrainConfig {
            model: GnnKind::Gcn,
            epochs: 60,
            learning_rate: 0.01,
            hidden_dim: 8,
            weighted_adjacency: false,
            seed: 5,
        };
        let lp = train_link_predictor(&g, FeatureSource::OneHot, 8, &config).unwrap();
        for u in 0..g.node_count() {
            for v in 0..g.node_count() {
                assert_eq!(lp.score(u, v), lp.score(v, u));
            }
        }
        assert!(lp.epoch_losses.iter().all(|l| l.is_finite()));
        assert!(lp.epoch_losses.last().unwrap() < lp.epoch_losses.first().unwrap());
    }

    #[test]
    fn zero_vectors_give_zero_scores() {
        let z = DenseMatrix::zeros(4, 8);
        assert_eq!(pair_score(&z, 0, 3), 0.0);
    }

    #[test]
    fn link_predictor_rejects_empty_graph() {
        let g = CharacterGraph::from_parts(vec!["A".into(), "B".into()], []).unwrap();
        let config = TrainConfig::link_prediction(GnnKind::Gcn, 1);
        assert!(matches!(
            train_link_predictor(&g, FeatureSource::OneHot, 4, &config),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn negative_pairs_never_collide_with_edges() {
        let (g, _) = two_cliques_with_bridge();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for (u, v) in sample_negative_pairs(&g, 200, &mut rng) {
            assert!(!g.has_edge(u, v));
            assert!(u != v);
        }
    }
}
