//! Synthetic planted-partition benchmark: a seeded community graph plus a
//! generated text corpus consistent with it, used as the desk-scale stand-in
//! for corpora that cannot ship with the repository.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::RawDocument;
use crate::error::Result;
use crate::graph::CharacterGraph;
use crate::util::derive_seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedConfig {
    pub blocks: usize,
    pub block_size: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub seed: u64,
    /// Attach stray components to the giant one so the benchmark graph is
    /// always connected.
    pub ensure_connected: bool,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            blocks: 3,
            block_size: 30,
            p_intra: 0.4,
            p_inter: 0.01,
            seed: 1,
            ensure_connected: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedBenchmark {
    pub graph: CharacterGraph,
    /// Ground-truth block per node, aligned to graph node order.
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
    pub config: PlantedConfig,
}

fn node_name(block: usize, index: usize) -> String {
    let prefix = (b'A' + block as u8) as char;
    format!("{prefix}{index:02}")
}

/// Seeded planted-partition graph with edge weights in 1..=3.
pub fn planted_partition(config: &PlantedConfig) -> Result<PlantedBenchmark> {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let n = config.blocks * config.block_size;
    let names: Vec<String> = (0..n)
        .map(|i| node_name(i / config.block_size, i % config.block_size))
        .collect();
    let mut edges: Vec<(String, String, u64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let same_block = i / config.block_size == j / config.block_size;
            let p = if same_block {
                config.p_intra
            } else {
                config.p_inter
            };
            if rng.gen::<f64>() < p {
                let weight = rng.gen_range(1..=3u64);
                edges.push((names[i].clone(), names[j].clone(), weight));
            }
        }
    }
    let mut graph = CharacterGraph::from_parts(names, edges)?;

    if config.ensure_connected && !graph.is_connected() {
        // Attach each stray component's first node to the giant component's
        // first node in the same block when possible.
        let components = graph.components();
        let giant: Vec<usize> = components[0].clone();
        let mut extra: Vec<(String, String, u64)> = Vec::new();
        for component in &components[1..] {
            let orphan = component[0];
            let orphan_block = graph.id(orphan).as_bytes()[0];
            let anchor = giant
                .iter()
                .find(|&&v| graph.id(v).as_bytes()[0] == orphan_block)
                .or_else(|| giant.first())
                .copied()
                .unwrap();
            extra.push((graph.id(orphan).to_string(), graph.id(anchor).to_string(), 1));
        }
        let mut all: Vec<(String, String, u64)> = graph
            .edges()
            .map(|(u, v, w)| (graph.id(u).to_string(), graph.id(v).to_string(), w))
            .collect();
        all.extend(extra);
        graph = CharacterGraph::from_parts(graph.nodes().to_vec(), all)?;
    }

    let labels: Vec<usize> = graph
        .nodes()
        .iter()
        .map(|id| (id.as_bytes()[0] - b'A') as usize)
        .collect();
    let classes: Vec<String> = (0..config.blocks)
        .map(|b| format!("work_{}", (b'A' + b as u8) as char))
        .collect();
    let ids: Vec<String> = graph.nodes().to_vec();
    for (id, &label) in ids.iter().zip(&labels) {
        graph.set_attribute(id, "block", &label.to_string())?;
    }
    Ok(PlantedBenchmark {
        graph,
        labels,
        classes,
        config: config.clone(),
    })
}

const VERBS: &[&str] = &[
    "met", "followed", "helped", "watched", "joined", "warned", "found", "trusted",
];
const FILLER: &[&str] = &[
    "quietly", "meadow", "bridge", "road", "river", "lantern", "evening", "storm", "market",
    "harbor", "forest", "tower", "valley", "morning", "letter", "garden",
];

fn filler_words(rng: &mut ChaCha20Rng, count: usize) -> String {
    (0..count)
        .map(|_| FILLER[rng.gen_range(0..FILLER.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates one document per block whose sentence co-occurrences reproduce
/// the benchmark graph exactly.
///
/// Every edge of weight `w` yields `w` sentences mentioning exactly that
/// node pair, placed in the lower endpoint's block document. Five solo
/// sentences per character keep every name above the usual word-embedding
/// frequency cutoff without adding co-occurrences.
pub fn benchmark_corpus(benchmark: &PlantedBenchmark, seed: u64) -> Vec<RawDocument> {
    let g = &benchmark.graph;
    let blocks = benchmark.config.blocks;
    let mut sentences_per_block: Vec<Vec<String>> = vec![Vec::new(); blocks];
    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, 0, 0xC0));

    for (u, v, w) in g.edges() {
        let block = benchmark.labels[u.min(v)];
        for _ in 0..w {
            let verb = VERBS[rng.gen_range(0..VERBS.len())];
            let sentence = format!(
                "{} {} {} near the {} {}.",
                g.id(u),
                verb,
                g.id(v),
                filler_words(&mut rng, 1),
                filler_words(&mut rng, 1),
            );
            sentences_per_block[block].push(sentence);
        }
    }
    for (idx, id) in g.nodes().iter().enumerate() {
        let block = benchmark.labels[idx];
        for _ in 0..5 {
            let sentence = format!(
                "{} walked by the {} in the {}.",
                id,
                filler_words(&mut rng, 1),
                filler_words(&mut rng, 1),
            );
            sentences_per_block[block].push(sentence);
        }
    }

    (0..blocks)
        .map(|block| {
            // Shuffle sentence order deterministically and insert chapter
            // headings every 40 sentences.
            let mut order: Vec<usize> = (0..sentences_per_block[block].len()).collect();
            use rand::seq::SliceRandom;
            let mut block_rng =
                ChaCha20Rng::seed_from_u64(derive_seed(seed, block as u64 + 1, 0xD0));
            order.shuffle(&mut block_rng);
            let mut text = String::new();
            for (k, &s) in order.iter().enumerate() {
                if k % 40 == 0 {
                    text.push_str(&format!("Chapter {}\n", k / 40 + 1));
                }
                text.push_str(&sentences_per_block[block][s]);
                text.push('\n');
            }
            RawDocument {
                work_id: benchmark.classes[block].clone(),
                title: format!("Benchmark Work {}", (b'A' + block as u8) as char),
                text,
                chapter_delimiter: None,
            }
        })
        .collect()
}
