//! Edge holdout splits for link prediction.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::graph::CharacterGraph;

#[derive(Debug, Clone)]
pub struct EdgeSplit {
    /// The input graph minus holdout edges; the node set is unchanged.
    pub train_graph: CharacterGraph,
    pub test_positives: Vec<(String, String)>,
    /// Uniformly sampled unconnected pairs, disjoint from every positive.
    pub test_negatives: Vec<(String, String)>,
    /// False when removing the holdout disconnected the training graph.
    pub train_connected: bool,
}

/// Removes a uniformly sampled `holdout_fraction` of edges and samples an
/// equal count of negatives from pairs unconnected in the full graph.
pub fn edge_split(g: &CharacterGraph, holdout_fraction: f64, seed: u64) -> Result<EdgeSplit> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(Error::InvalidHoldout(holdout_fraction));
    }
    let edges: Vec<(usize, usize, u64)> = g.edges().collect();
    let m = edges.len();
    let holdout = (m as f64 * holdout_fraction).floor() as usize;
    if holdout == 0 || holdout >= m {
        return Err(Error::HoldoutTooLarge {
            requested: holdout,
            available: m,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);

    let test_idx: BTreeSet<usize> = order[..holdout].iter().copied().collect();
    let test_positives: Vec<(String, String)> = order[..holdout]
        .iter()
        .map(|&k| {
            let (u, v, _) = edges[k];
            (g.id(u).to_string(), g.id(v).to_string())
        })
        .collect();
    let train_edges: Vec<(String, String, u64)> = edges
        .iter()
        .enumerate()
        .filter(|(k, _)| !test_idx.contains(k))
        .map(|(_, &(u, v, w))| (g.id(u).to_string(), g.id(v).to_string(), w))
        .collect();
    let train_graph = CharacterGraph::from_parts(g.nodes().to_vec(), train_edges)?;

    // Negatives: unconnected pairs of the FULL graph, so they collide with
    // neither train nor test positives.
    let n = g.node_count();
    let mut negatives: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut guard = 0usize;
    while negatives.len() < holdout {
        guard += 1;
        if guard > holdout * 10_000 {
            return Err(Error::InvalidConfig(
                "not enough unconnected pairs for negative sampling".into(),
            ));
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let (u, v) = (u.min(v), u.max(v));
        if g.has_edge(u, v) {
            continue;
        }
        negatives.insert((u, v));
    }
    // Exhaustive disjointness check: no negative may be an edge anywhere.
    for &(u, v) in &negatives {
        assert!(!g.has_edge(u, v), "sampled negative collides with an edge");
    }
    let test_negatives: Vec<(String, String)> = negatives
        .into_iter()
        .map(|(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
        .collect();
    let train_connected = train_graph.is_connected();
    Ok(EdgeSplit {
        train_graph,
        test_positives,
        test_negatives,
        train_connected,
    })
}
