//! Embedding + logistic-regression baselines over Hadamard pair features.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::metrics::roc_auc;
use crate::gnn::{logistic_fit, logistic_predict, sample_negative_pairs, LogisticConfig};
use crate::graph::CharacterGraph;
use crate::linalg::DenseMatrix;

/// Elementwise product of the two nodes' vectors.
pub fn hadamard_feature(embedding: &EmbeddingMatrix, u: &str, v: &str) -> Result<Vec<f64>> {
    let a = embedding
        .vector(u)
        .ok_or_else(|| Error::MissingVector(u.to_string()))?;
    let b = embedding
        .vector(v)
        .ok_or_else(|| Error::MissingVector(v.to_string()))?;
    Ok(a.iter().zip(b).map(|(x, y)| x * y).collect())
}

/// Trains binary logistic regression on Hadamard features of the training
/// graph's edges plus 1:1 sampled non-edges, then scores the test pairs.
/// Returns the ROC/AUC on the test set.
pub fn embedding_link_baseline(
    embedding: &EmbeddingMatrix,
    g_train: &CharacterGraph,
    test_positives: &[(String, String)],
    test_negatives: &[(String, String)],
    config: &LogisticConfig,
    seed: u64,
) -> Result<f64> {
    let positives: Vec<(usize, usize)> = g_train.edges().map(|(u, v, _)| (u, v)).collect();
    if positives.is_empty() {
        return Err(Error::NoEdges);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let negatives = sample_negative_pairs(g_train, positives.len(), &mut rng);

    let mut rows = Vec::with_capacity(positives.len() + negatives.len());
    let mut labels = Vec::with_capacity(rows.capacity());
    for &(u, v) in &positives {
        rows.push(hadamard_feature(embedding, g_train.id(u), g_train.id(v))?);
        labels.push(1usize);
    }
    for &(u, v) in &negatives {
        rows.push(hadamard_feature(embedding, g_train.id(u), g_train.id(v))?);
        labels.push(0usize);
    }
    let model = logistic_fit(&DenseMatrix::from_rows(rows), &labels, config)?;

    let mut test_rows = Vec::with_capacity(test_positives.len() + test_negatives.len());
    let mut test_labels = Vec::with_capacity(test_rows.capacity());
    for (u, v) in test_positives {
        test_rows.push(hadamard_feature(embedding, u, v)?);
        test_labels.push(true);
    }
    for (u, v) in test_negatives {
        test_rows.push(hadamard_feature(embedding, u, v)?);
        test_labels.push(false);
    }
    let probs = logistic_predict(&model, &DenseMatrix::from_rows(test_rows))?;
    let scores: Vec<f64> = (0..probs.rows()).map(|i| probs.get(i, 1)).collect();
    roc_auc(&scores, &test_labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Provenance;
    use crate::eval::split::edge_split;

    /// Two 8-cliques, one bridge; embeddings where coordinates mark the
    /// block, so connected pairs overlap strongly.
    fn clique_setup() -> (CharacterGraph, EmbeddingMatrix) {
        let names: Vec<String> = (0..16).map(|i| format!("n{i:02}")).collect();
        let mut edges = Vec::new();
        for block in 0..2 {
            let lo = block * 8;
            for i in lo..lo + 8 {
                for j in (i + 1)..lo + 8 {
                    edges.push((names[i].clone(), names[j].clone(), 1u64));
                }
            }
        }
        edges.push((names[0].clone(), names[8].clone(), 1));
        let g = CharacterGraph::from_weighted_edges(edges).unwrap();
        let vectors = DenseMatrix::from_fn(16, 4, |i, j| {
            let block = i / 8;
            // jitter keeps the logistic problem non-degenerate
            let jitter = ((i * 7 + j * 3) % 5) as f64 * 0.02;
            if j % 2 == block {
                1.0 + jitter
            } else {
                0.05 + jitter
            }
        });
        let embedding = EmbeddingMatrix::new(
            g.nodes().to_vec(),
            vectors,
            Provenance::Node2vec,
            serde_json::json!({}),
        );
        (g, embedding)
    }

    #[test]
    fn separable_embedding_scores_high_auc() {
        let (g, embedding) = clique_setup();
        let split = edge_split(&g, 0.15, 5).unwrap();
        let auc = embedding_link_baseline(
            &embedding,
            &split.train_graph,
            &split.test_positives,
            &split.test_negatives,
            &LogisticConfig {
                learning_rate: 0.1,
                ..Default::default()
            },
            9,
        )
        .unwrap();
        assert!(auc > 0.9, "auc {auc}");
    }

    #[test]
    fn random_embedding_hovers_near_chance() {
        let (g, _) = clique_setup();
        let mut state = 0xFEED_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let vectors = DenseMatrix::from_fn(16, 8, |_, _| next());
        let embedding = EmbeddingMatrix::new(
            g.nodes().to_vec(),
            vectors,
            Provenance::Node2vec,
            serde_json::json!({}),
        );
        // Average over several splits so the check is stable.
        let mut total = 0.0;
        for seed in 0..8 {
            let split = edge_split(&g, 0.15, seed).unwrap();
            total += embedding_link_baseline(
                &embedding,
                &split.train_graph,
                &split.test_positives,
                &split.test_negatives,
                &LogisticConfig::default(),
                seed,
            )
            .unwrap();
        }
        let mean = total / 8.0;
        assert!((mean - 0.5).abs() < 0.25, "mean auc {mean}");
    }

    #[test]
    fn missing_vector_names_the_node() {
        let (g, embedding) = clique_setup();
        let mut truncated = embedding.clone();
        truncated.entity_ids.pop();
        let split = edge_split(&g, 0.15, 5).unwrap();
        let err = embedding_link_baseline(
            &truncated,
            &split.train_graph,
            &split.test_positives,
            &split.test_negatives,
            &LogisticConfig::default(),
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingVector(_)));
    }

    #[test]
    fn hadamard_preserves_dimension() {
        let (_, embedding) = clique_setup();
        let f = hadamard_feature(&embedding, "n00", "n05").unwrap();
        assert_eq!(f.len(), embedding.dim);
    }
}
