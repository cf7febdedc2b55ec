//! Central-finite-difference verification of the analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gnn::adjacency::normalize_adjacency;
use crate::gnn::gat::{gat_backward, gat_forward, GatParams, GatStructure};
use crate::gnn::gcn::{gcn_backward, gcn_forward, GcnParams};
use crate::gnn::logistic::{cross_entropy, LogisticModel};
use crate::gnn::training::masked_cross_entropy;
use crate::graph::CharacterGraph;
use crate::linalg::DenseMatrix;

const STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckModel {
    Gcn,
    Gat,
    Logistic,
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-4)
}

fn max_relative_error(
    analytic: &[f64],
    flat: &[f64],
    mut loss_at: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let mut worst = 0.0f64;
    let mut probe = flat.to_vec();
    for i in 0..flat.len() {
        probe[i] = flat[i] + STEP;
        let up = loss_at(&probe);
        probe[i] = flat[i] - STEP;
        let down = loss_at(&probe);
        probe[i] = flat[i];
        let numeric = (up - down) / (2.0 * STEP);
        worst = worst.max(relative_error(analytic[i], numeric));
    }
    worst
}

fn random_instance(seed: u64, n: usize) -> (CharacterGraph, DenseMatrix, Vec<usize>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < 0.5 {
                edges.push((names[i].clone(), names[j].clone(), rng.gen_range(1..4u64)));
            }
        }
    }
    let g = CharacterGraph::from_parts(names, edges).unwrap();
    let features = DenseMatrix::from_fn(n, 3, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    (g, features, labels)
}

/// Compares analytic gradients against central finite differences for every
/// parameter of a small seeded instance; returns the max relative error.
pub fn gradient_check(model: CheckModel, seed: u64) -> Result<f64> {
    match model {
        CheckModel::Gcn => {
            let (g, features, labels) = random_instance(seed, 5);
            let norm_adj = normalize_adjacency(&g, true);
            let params = GcnParams::init(3, 4, 2, seed ^ 0xA5);
            let mask = vec![true; 5];

            let cache = gcn_forward(&params, &features, &norm_adj)?;
            let (_, d_out) = masked_cross_entropy(&cache.output, &labels, &mask);
            let grads = gcn_backward(&params, &features, &norm_adj, &cache, &d_out)?;

            let flat = params.to_flat();
            let analytic = grads.to_flat();
            Ok(max_relative_error(&analytic, &flat, |probe| {
                let p = params.from_flat(probe);
                let cache = gcn_forward(&p, &features, &norm_adj).unwrap();
                masked_cross_entropy(&cache.output, &labels, &mask).0
            }))
        }
        CheckModel::Gat => {
            let (g, features, labels) = random_instance(seed, 5);
            let structure = GatStructure::new(&g, true);
            let params = GatParams::init(3, 4, 2, seed ^ 0x5A);
            let mask = vec![true; 5];

            let cache = gat_forward(&params, &features, &structure)?;
            let (_, d_out) = masked_cross_entropy(&cache.layer1.out, &labels, &mask);
            let grads = gat_backward(&params, &features, &structure, &cache, &d_out)?;

            let flat = params.to_flat();
            let analytic = grads.to_flat();
            Ok(max_relative_error(&analytic, &flat, |probe| {
                let p = params.from_flat(probe);
                let cache = gat_forward(&p, &features, &structure).unwrap();
                masked_cross_entropy(&cache.layer1.out, &labels, &mask).0
            }))
        }
        CheckModel::Logistic => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let n = 10;
            let features =
                DenseMatrix::from_fn(n, 3, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            labels[0] = 0;
            labels[1] = 1;
            labels[2] = 2;
            let mut model = LogisticModel::zeros(3, 3);
            let init = ChaCha20Rng::seed_from_u64(seed ^ 0x33)
                .sample_iter(rand::distributions::Uniform::new(-0.5, 0.5))
                .take(model.to_flat().len())
                .collect::<Vec<f64>>();
            model = model.from_flat(&init);

            let loss_of = |m: &LogisticModel| -> (f64, DenseMatrix) {
                let mut logits = features.matmul(&m.weights).unwrap();
                logits.add_row_broadcast(&m.bias);
                cross_entropy(&logits, &labels)
            };
            let (_, d_logits) = loss_of(&model);
            let d_w = features.transpose().matmul(&d_logits)?;
            let mut d_b = vec![0.0; 3];
            for i in 0..n {
                for (s, v) in d_b.iter_mut().zip(d_logits.row(i)) {
                    *s += v;
                }
            }
            let mut analytic = d_w.values().to_vec();
            analytic.extend_from_slice(&d_b);

            let flat = model.to_flat();
            Ok(max_relative_error(&analytic, &flat, |probe| {
                loss_of(&model.from_flat(probe)).0
            }))
        }
    }
}
