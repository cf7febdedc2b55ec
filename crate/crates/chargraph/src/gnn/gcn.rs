//! Two-layer graph convolutional network with hand-derived gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnParams {
    pub w0: DenseMatrix,
    pub b0: Vec<f64>,
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
}

/// Seeded Glorot-uniform weights, zero biases.
pub fn glorot(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> DenseMatrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    DenseMatrix::from_fn(rows, cols, |_, _| (rng.gen::<f64>() * 2.0 - 1.0) * limit)
}

impl GcnParams {
    pub fn init(in_dim: usize, hidden_dim: usize, out_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        Self {
            w0: glorot(in_dim, hidden_dim, &mut rng),
            b0: vec![0.0; hidden_dim],
            w1: glorot(hidden_dim, out_dim, &mut rng),
            b1: vec![0.0; out_dim],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            w0: DenseMatrix::zeros(self.w0.rows(), self.w0.cols()),
            b0: vec![0.0; self.b0.len()],
            w1: DenseMatrix::zeros(self.w1.rows(), self.w1.cols()),
            b1: vec![0.0; self.b1.len()],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        flat.extend_from_slice(self.w0.values());
        flat.extend_from_slice(&self.b0);
        flat.extend_from_slice(self.w1.values());
        flat.extend_from_slice(&self.b1);
        flat
    }

    pub fn from_flat(&self, flat: &[f64]) -> Self {
        let mut it = flat.iter().copied();
        let mut take = |n: usize| -> Vec<f64> { (0..n).map(|_| it.next().unwrap()).collect() };
        let w0v = take(self.w0.rows() * self.w0.cols());
        let b0 = take(self.b0.len());
        let w1v = take(self.w1.rows() * self.w1.cols());
        let b1 = take(self.b1.len());
        let mut w0 = DenseMatrix::zeros(self.w0.rows(), self.w0.cols());
        w0.values_mut().copy_from_slice(&w0v);
        let mut w1 = DenseMatrix::zeros(self.w1.rows(), self.w1.cols());
        w1.values_mut().copy_from_slice(&w1v);
        Self { w0, b0, w1, b1 }
    }
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug)]
pub struct GcnCache {
    pub pre_hidden: DenseMatrix,
    pub hidden: DenseMatrix,
    pub output: DenseMatrix,
}

fn check_shapes(params: &GcnParams, features: &DenseMatrix, norm_adj: &DenseMatrix) -> Result<()> {
    if norm_adj.rows() != features.rows() {
        return Err(Error::ShapeMismatch {
            context: "gcn input".into(),
            expected: format!("{} feature rows", norm_adj.rows()),
            actual: format!("{}", features.rows()),
        });
    }
    if features.cols() != params.w0.rows() {
        return Err(Error::ShapeMismatch {
            context: "gcn layer 0".into(),
            expected: format!("{} input columns", params.w0.rows()),
            actual: format!("{}", features.cols()),
        });
    }
    if params.w0.cols() != params.w1.rows() {
        return Err(Error::ShapeMismatch {
            context: "gcn layer 1".into(),
            expected: format!("{} hidden columns", params.w1.rows()),
            actual: format!("{}", params.w0.cols()),
        });
    }
    Ok(())
}

/// H = relu(Â X W0 + b0); out = Â H W1 + b1.
pub fn gcn_forward(
    params: &GcnParams,
    features: &DenseMatrix,
    norm_adj: &DenseMatrix,
) -> Result<GcnCache> {
    check_shapes(params, features, norm_adj)?;
    let mut pre_hidden = norm_adj.matmul(features)?.matmul(&params.w0)?;
    pre_hidden.add_row_broadcast(&params.b0);
    let hidden = pre_hidden.map(|v| v.max(0.0));
    let mut output = norm_adj.matmul(&hidden)?.matmul(&params.w1)?;
    output.add_row_broadcast(&params.b1);
    Ok(GcnCache {
        pre_hidden,
        hidden,
        output,
    })
}

fn column_sums(m: &DenseMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (s, v) in sums.iter_mut().zip(m.row(i)) {
            *s += v;
        }
    }
    sums
}

/// Parameter gradients for `d_output` = dLoss/dOut. `norm_adj` must be the
/// symmetric matrix used in the forward pass.
pub fn gcn_backward(
    params: &GcnParams,
    features: &DenseMatrix,
    norm_adj: &DenseMatrix,
    cache: &GcnCache,
    d_output: &DenseMatrix,
) -> Result<GcnParams> {
    // out = Â H W1 + b1
    let adj_d_out = norm_adj.matmul(d_output)?;
    let d_w1 = cache.hidden.transpose().matmul(&adj_d_out)?;
    let d_b1 = column_sums(d_output);
    let d_hidden = adj_d_out.matmul(&params.w1.transpose())?;
    // relu gate
    let mut d_pre = d_hidden;
    for (g, pre) in d_pre
        .values_mut()
        .iter_mut()
        .zip(cache.pre_hidden.values())
    {
        if *pre <= 0.0 {
            *g = 0.0;
        }
    }
    let adj_d_pre = norm_adj.matmul(&d_pre)?;
    let d_w0 = features.transpose().matmul(&adj_d_pre)?;
    let d_b0 = column_sums(&d_pre);
    Ok(GcnParams {
        w0: d_w0,
        b0: d_b0,
        w1: d_w1,
        b1: d_b1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::normalize_adjacency;
    use crate::graph::CharacterGraph;

    #[test]
    fn two_node_hand_case() {
        // Â for a single unweighted edge is all 0.5; with X = I, W0 = I,
        // zero biases: hidden = relu(Â) = Â.
        let g = CharacterGraph::from_weighted_edges([("A".to_string(), "B".to_string(), 1)])
            .unwrap();
        let norm_adj = normalize_adjacency(&g, false);
        let params = GcnParams {
            w0: DenseMatrix::identity(2),
            b0: vec![0.0; 2],
            w1: DenseMatrix::identity(2),
            b1: vec![0.0; 2],
        };
        let features = DenseMatrix::identity(2);
        let cache = gcn_forward(&params, &features, &norm_adj).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((cache.hidden.get(i, j) - 0.5).abs() < 1e-12);
                // out = Â Â: each entry 0.5
                assert!((cache.output.get(i, j) - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_weights_give_zero_logits() {
        let g = CharacterGraph::from_weighted_edges([
            ("A".to_string(), "B".to_string(), 1),
            ("B".to_string(), "C".to_string(), 2),
        ])
        .unwrap();
        let norm_adj = normalize_adjacency(&g, true);
        let mut params = GcnParams::init(3, 4, 2, 1);
        params.w0.scale(0.0);
        params.w1.scale(0.0);
        let cache = gcn_forward(&params, &DenseMatrix::identity(3), &norm_adj).unwrap();
        assert!(cache.output.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_names_the_layer() {
        let g = CharacterGraph::from_weighted_edges([("A".to_string(), "B".to_string(), 1)])
            .unwrap();
        let norm_adj = normalize_adjacency(&g, false);
        let params = GcnParams::init(5, 4, 2, 1);
        let err = gcn_forward(&params, &DenseMatrix::identity(2), &norm_adj).unwrap_err();
        assert!(err.to_string().contains("layer 0"), "{err}");
    }

    #[test]
    fn flat_round_trip() {
        let params = GcnParams::init(3, 4, 2, 9);
        let flat = params.to_flat();
        assert_eq!(params.from_flat(&flat), params);
    }
}
