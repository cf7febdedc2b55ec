//! Biased second-order random walks and the node embedding built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::embed::skipgram::{skipgram_train, SkipgramConfig, SkipgramResult};
use crate::embed::Provenance;
use crate::error::{Error, Result};
use crate::graph::CharacterGraph;

/// Parameters of the second-order walk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Return parameter: revisiting the previous node scales with 1/p.
    pub p: f64,
    /// In-out parameter: moving outward scales with 1/q.
    pub q: f64,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub seed: u64,
    /// Use co-occurrence weights in transitions; false treats all edges as 1.
    pub weighted: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            q: 1.0,
            walks_per_node: 10,
            walk_length: 80,
            seed: 1,
            weighted: false,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p <= 0.0 || self.q <= 0.0 {
            return Err(Error::InvalidConfig("p and q must be positive".into()));
        }
        if self.walks_per_node < 1 || self.walk_length < 2 {
            return Err(Error::InvalidConfig(
                "need walks_per_node >= 1 and walk_length >= 2".into(),
            ));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-walk seed derived from `(seed, node, walk index)` so walks are
/// independent of generation order.
fn derive_seed(master: u64, node: u64, walk: u64) -> u64 {
    splitmix(splitmix(master ^ splitmix(node.wrapping_add(1))) ^ splitmix(walk.wrapping_add(0x51ED)))
}

/// Normalized transition distribution out of `current`, having arrived from
/// `prev` (None for the first step).
///
/// The unnormalized weight toward neighbor `x` is `w(current, x) * alpha`
/// with `alpha = 1/p` if `x == prev`, `1` if `x` neighbors `prev`, and `1/q`
/// otherwise.
pub fn transition_distribution(
    g: &CharacterGraph,
    prev: Option<usize>,
    current: usize,
    config: &WalkConfig,
) -> Vec<(usize, f64)> {
    let neighbors = g.neighbors(current);
    if neighbors.is_empty() {
        return Vec::new();
    }
    let mut weights: Vec<(usize, f64)> = neighbors
        .iter()
        .map(|&(x, w)| {
            let edge = if config.weighted { w as f64 } else { 1.0 };
            let alpha = match prev {
                None => 1.0,
                Some(t) if x == t => 1.0 / config.p,
                Some(t) if g.has_edge(t, x) => 1.0,
                Some(_) => 1.0 / config.q,
            };
            (x, edge * alpha)
        })
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut weights {
        *w /= total;
    }
    weights
}

fn sample(dist: &[(usize, f64)], rng: &mut ChaCha20Rng) -> usize {
    let draw = rng.gen::<f64>();
    let mut acc = 0.0;
    for &(node, w) in dist {
        acc += w;
        if draw < acc {
            return node;
        }
    }
    dist.last().unwrap().0
}

/// Generates `walks_per_node` walks from every node, as node-index sequences.
///
/// A node with no neighbors yields walks of length 1.
pub fn node2vec_walks(g: &CharacterGraph, config: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    config.validate()?;
    let mut walks = Vec::with_capacity(g.node_count() * config.walks_per_node);
    for start in 0..g.node_count() {
        for walk_idx in 0..config.walks_per_node {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(
                config.seed,
                start as u64,
                walk_idx as u64,
            ));
            let mut walk = Vec::with_capacity(config.walk_length);
            walk.push(start);
            let mut prev: Option<usize> = None;
            let mut current = start;
            while walk.len() < config.walk_length {
                let dist = transition_distribution(g, prev, current, config);
                if dist.is_empty() {
                    break;
                }
                let next = sample(&dist, &mut rng);
                walk.push(next);
                prev = Some(current);
                current = next;
            }
            walks.push(walk);
        }
    }
    Ok(walks)
}

/// Skipgram hyperparameters for training over walks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node2vecConfig {
    pub dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for Node2vecConfig {
    fn default() -> Self {
        Self {
            dim: 20,
            window: 10,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.025,
        }
    }
}

/// node2vec: second-order walks fed through skipgram.
pub fn node2vec(
    g: &CharacterGraph,
    walk_config: &WalkConfig,
    config: &Node2vecConfig,
) -> Result<SkipgramResult> {
    let walks = node2vec_walks(g, walk_config)?;
    let sequences: Vec<Vec<String>> = walks
        .into_iter()
        .map(|walk| walk.into_iter().map(|v| g.id(v).to_string()).collect())
        .collect();
    let sg = SkipgramConfig {
        dim: config.dim,
        window: config.window,
        negative_samples: config.negative_samples,
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        min_count: 1,
        seed: walk_config.seed,
    };
    let mut result = skipgram_train(&sequences, &sg)?;
    result.embedding.provenance = Provenance::Node2vec;
    result.embedding.config = serde_json::json!({
        "walks": walk_config,
        "skipgram": config,
    });
    Ok(result)
}
