//! Skipgram training with negative sampling, plus the word-embedding
//! front end that feeds corpus sentences through it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::characters::MentionRecord;
use crate::corpus::TokenizedCorpus;
use crate::embed::{EmbeddingMatrix, Provenance};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkipgramConfig {
    pub dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SkipgramResult {
    pub embedding: EmbeddingMatrix,
    /// Mean loss per epoch; training should push the last below the first.
    pub epoch_losses: Vec<f64>,
    pub pairs_per_epoch: usize,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Trains skipgram embeddings with negative sampling.
///
/// Negatives follow the unigram^(3/4) distribution. One seeded RNG drives
/// everything single-threaded, so identical seeds give identical matrices.
pub fn skipgram_train(sequences: &[Vec<String>], config: &SkipgramConfig) -> Result<SkipgramResult> {
    if config.dim == 0 {
        return Err(Error::InvalidConfig("skipgram dim must be >= 1".into()));
    }
    if sequences.is_empty() {
        return Err(Error::InvalidConfig("no skipgram input sequences".into()));
    }
    // Vocabulary: tokens at or above min_count, most frequent first.
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for token in sequences.iter().flatten() {
        *counts.entry(token.as_str()).or_insert(0) += 1;
    }
    let mut vocab: Vec<(&str, u64)> = counts
        .iter()
        .filter(|(_, &c)| c as usize >= config.min_count.max(1))
        .map(|(&t, &c)| (t, c))
        .collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary {
            min_count: config.min_count,
        });
    }
    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (*t, i))
        .collect();
    let encoded: Vec<Vec<usize>> = sequences
        .iter()
        .map(|seq| {
            seq.iter()
                .filter_map(|t| index.get(t.as_str()).copied())
                .collect()
        })
        .collect();

    let pairs_per_epoch: usize = encoded
        .iter()
        .map(|seq| {
            (0..seq.len())
                .map(|c| {
                    let lo = c.saturating_sub(config.window);
                    let hi = (c + config.window).min(seq.len() - 1);
                    hi - lo
                })
                .sum::<usize>()
        })
        .sum();
    if pairs_per_epoch == 0 {
        return Err(Error::InvalidConfig(
            "no skipgram training pairs (sequences too short)".into(),
        ));
    }

    // Cumulative unigram^(3/4) table for negative sampling.
    let noise: Vec<f64> = {
        let mut acc = 0.0;
        vocab
            .iter()
            .map(|(_, c)| {
                acc += (*c as f64).powf(0.75);
                acc
            })
            .collect()
    };
    let noise_total = *noise.last().unwrap();

    let vsize = vocab.len();
    let dim = config.dim;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut input: Vec<f64> = (0..vsize * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output: Vec<f64> = vec![0.0; vsize * dim];

    let total_pairs = (pairs_per_epoch * config.epochs) as f64;
    let mut processed = 0f64;
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut grad_center = vec![0.0f64; dim];

    for _epoch in 0..config.epochs {
        let mut loss = 0.0;
        for seq in &encoded {
            for center_pos in 0..seq.len() {
                let center = seq[center_pos];
                let lo = center_pos.saturating_sub(config.window);
                let hi = (center_pos + config.window).min(seq.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == center_pos {
                        continue;
                    }
                    let context = seq[ctx_pos];
                    let lr = config.learning_rate
                        * (1.0 - processed / total_pairs).max(1e-4);
                    processed += 1.0;

                    let center_vec = center * dim;
                    grad_center.iter_mut().for_each(|g| *g = 0.0);
                    // Positive target plus sampled negatives.
                    for k in 0..=config.negative_samples {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let draw = rng.gen::<f64>() * noise_total;
                            let t = noise.partition_point(|&c| c < draw).min(vsize - 1);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let target_vec = target * dim;
                        let dot: f64 = (0..dim)
                            .map(|j| input[center_vec + j] * output[target_vec + j])
                            .sum();
                        let pred = sigmoid(dot);
                        loss -= if label == 1.0 {
                            pred.max(1e-12).ln()
                        } else {
                            (1.0 - pred).max(1e-12).ln()
                        };
                        let g = (pred - label) * lr;
                        for j in 0..dim {
                            grad_center[j] += g * output[target_vec + j];
                            output[target_vec + j] -= g * input[center_vec + j];
                        }
                    }
                    for j in 0..dim {
                        input[center_vec + j] -= grad_center[j];
                    }
                }
            }
        }
        epoch_losses.push(loss / pairs_per_epoch as f64);
    }

    let entity_ids: Vec<String> = vocab.iter().map(|(t, _)| t.to_string()).collect();
    let vectors = DenseMatrix::from_fn(vsize, dim, |i, j| input[i * dim + j]);
    Ok(SkipgramResult {
        embedding: EmbeddingMatrix::new(
            entity_ids,
            vectors,
            Provenance::WordContext,
            serde_json::to_value(config)?,
        ),
        epoch_losses,
        pairs_per_epoch,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordEmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
    /// Replace resolved multi-token mentions with single canonical tokens.
    pub resolve_mentions: bool,
}

impl Default for WordEmbeddingConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            window: 5,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 5,
            seed: 1,
            resolve_mentions: true,
        }
    }
}

/// Sentence sequences for skipgram training, optionally with mention spans
/// collapsed into canonical character tokens.
pub fn corpus_sequences(
    corpus: &TokenizedCorpus,
    mentions: Option<&[MentionRecord]>,
) -> Vec<Vec<String>> {
    let mut by_sentence: HashMap<usize, Vec<&MentionRecord>> = HashMap::new();
    if let Some(mentions) = mentions {
        for m in mentions {
            by_sentence.entry(m.sentence_index).or_default().push(m);
        }
    }
    corpus
        .sentences
        .iter()
        .enumerate()
        .map(|(s, span)| {
            let mut seq = Vec::with_capacity(span.len());
            let mut sentence_mentions: Vec<&&MentionRecord> = Vec::new();
            if let Some(ms) = by_sentence.get(&s) {
                sentence_mentions.extend(ms.iter());
                sentence_mentions.sort_by_key(|m| m.token_range.start);
            }
            let mut next_mention = sentence_mentions.into_iter().peekable();
            let mut i = span.start;
            while i < span.end {
                if let Some(m) = next_mention.peek() {
                    if m.token_range.start == i {
                        seq.push(m.canonical_id.clone());
                        i = m.token_range.end;
                        next_mention.next();
                        continue;
                    }
                }
                seq.push(corpus.tokens[i].surface.clone());
                i += 1;
            }
            seq
        })
        .collect()
}

/// Word-context embeddings over the whole corpus (all works concatenated).
pub fn word_embeddings(
    corpus: &TokenizedCorpus,
    mentions: Option<&[MentionRecord]>,
    config: &WordEmbeddingConfig,
) -> Result<SkipgramResult> {
    let sequences = corpus_sequences(corpus, if config.resolve_mentions { mentions } else { None });
    let sg = SkipgramConfig {
        dim: config.dim,
        window: config.window,
        negative_samples: config.negative_samples,
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        min_count: config.min_count,
        seed: config.seed,
    };
    let mut result = skipgram_train(&sequences, &sg)?;
    result.embedding.config = serde_json::to_value(config)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::cosine;

    fn config(dim: usize, seed: u64) -> SkipgramConfig {
        SkipgramConfig {
            dim,
            window: 2,
            negative_samples: 3,
            epochs: 8,
            learning_rate: 0.05,
            min_count: 1,
            seed,
        }
    }

    #[test]
    fn adjacent_tokens_end_up_closer_than_distant_ones() {
        // X and Y always adjacent in one context family; Z lives in a
        // disjoint one and never appears near X.
        let mut sequences = Vec::new();
        for i in 0..80 {
            sequences.push(vec![
                "X".to_string(),
                "Y".to_string(),
                format!("p{}", i % 5),
                format!("p{}", (i + 2) % 5),
            ]);
            sequences.push(vec![
                "Z".to_string(),
                format!("n{}", i % 5),
                format!("n{}", (i + 1) % 5),
            ]);
        }
        let result = skipgram_train(&sequences, &config(16, 7)).unwrap();
        let e = &result.embedding;
        let sim_xy = cosine(e.vector("X").unwrap(), e.vector("Y").unwrap());
        let sim_xz = cosine(e.vector("X").unwrap(), e.vector("Z").unwrap());
        assert!(sim_xy > sim_xz, "cos(X,Y)={sim_xy} <= cos(X,Z)={sim_xz}");
    }

    #[test]
    fn loss_decreases_over_training() {
        let sequences: Vec<Vec<String>> = (0..30)
            .map(|i| {
                (0..10)
                    .map(|j| format!("w{}", (i + j) % 6))
                    .collect()
            })
            .collect();
        let result = skipgram_train(&sequences, &config(8, 3)).unwrap();
        let first = result.epoch_losses.first().unwrap();
        let last = result.epoch_losses.last().unwrap();
        assert!(last < first, "loss did not decrease: {first} -> {last}");
    }

    #[test]
    fn same_seed_gives_identical_matrices() {
        let sequences: Vec<Vec<String>> = (0..10)
            .map(|i| (0..8).map(|j| format!("w{}", (i * j) % 5)).collect())
            .collect();
        let a = skipgram_train(&sequences, &config(8, 42)).unwrap();
        let b = skipgram_train(&sequences, &config(8, 42)).unwrap();
        assert_eq!(a.embedding.vectors, b.embedding.vectors);
        let c = skipgram_train(&sequences, &config(8, 43)).unwrap();
        assert_ne!(a.embedding.vectors, c.embedding.vectors);
    }

    #[test]
    fn singleton_sequence_has_no_pairs() {
        let err = skipgram_train(&[vec!["x".to_string()]], &config(4, 1)).unwrap_err();
        assert!(err.to_string().contains("pairs"));
    }

    #[test]
    fn min_count_filters_vocabulary() {
        let sequences = vec![
            vec!["a".to_string(), "b".to_string(), "a".to_string(), "b".to_string()],
            vec!["a".to_string(), "rare".to_string(), "b".to_string()],
        ];
        let mut cfg = config(4, 1);
        cfg.min_count = 2;
        let result = skipgram_train(&sequences, &cfg).unwrap();
        assert!(result.embedding.vector("a").is_some());
        assert!(result.embedding.vector("rare").is_none());

        cfg.min_count = 10;
        assert!(matches!(
            skipgram_train(&sequences, &cfg),
            Err(Error::EmptyVocabulary { .. })
        ));
    }

    #[test]
    fn mention_resolution_collapses_multi_token_names() {
        use crate::characters::{extract_mentions, AliasTable};
        use crate::corpus::{load_corpus, RawDocument, SegmentationConfig};
        let corpus = load_corpus(
            &[RawDocument {
                work_id: "w".into(),
                title: "W".into(),
                text: "Bilbo Baggins met Sam. Sam met Bilbo Baggins again.".into(),
                chapter_delimiter: None,
            }],
            &SegmentationConfig::default(),
        )
        .unwrap();
        let table = AliasTable::compile(
            &[
                ("Bilbo Baggins".to_string(), "Bilbo".to_string()),
                ("Sam".to_string(), "Sam Gamgee".to_string()),
            ],
            &SegmentationConfig::default(),
        )
        .unwrap();
        let mentions = extract_mentions(&corpus, &table);
        let sequences = corpus_sequences(&corpus, Some(&mentions));
        assert_eq!(
            sequences[0],
            vec!["Bilbo", "met", "Sam Gamgee", "."]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>()
        );
        // With resolution, every character becomes a vocabulary entry.
        let cfg = WordEmbeddingConfig {
            dim: 8,
            min_count: 1,
            epochs: 2,
            ..Default::default()
        };
        let result = word_embeddings(&corpus, Some(&mentions), &cfg).unwrap();
        assert!(result.embedding.vector("Bilbo").is_some());
        assert!(result.embedding.vector("Sam Gamgee").is_some());
    }

    #[test]
    fn default_word_config_mirrors_standard_defaults() {
        let cfg = WordEmbeddingConfig::default();
        assert_eq!(cfg.dim, 300);
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.min_count, 5);
        assert_eq!(cfg.negative_samples, 5);
        assert_eq!(cfg.epochs, 5);
    }
}
