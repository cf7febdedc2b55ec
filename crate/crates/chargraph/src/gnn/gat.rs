//! Two-layer single-head graph attention network with hand-derived
//! gradients.
//!
//! Attention per node runs over its neighborhood plus itself. On weighted
//! graphs the unnormalized attention coefficient is scaled by the edge
//! weight, i.e. softmax(e_uv + ln w_uv) with self-loop weight 1.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::gcn::glorot;
use crate::graph::CharacterGraph;
use crate::linalg::DenseMatrix;

const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatLayer {
    pub w: DenseMatrix,
    pub a_src: Vec<f64>,
    pub a_dst: Vec<f64>,
    pub b: Vec<f64>,
}

impl GatLayer {
    fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha20Rng) -> Self {
        Self {
            w: glorot(in_dim, out_dim, rng),
            a_src: glorot(1, out_dim, rng).values().to_vec(),
            a_dst: glorot(1, out_dim, rng).values().to_vec(),
            b: vec![0.0; out_dim],
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            w: DenseMatrix::zeros(self.w.rows(), self.w.cols()),
            a_src: vec![0.0; self.a_src.len()],
            a_dst: vec![0.0; self.a_dst.len()],
            b: vec![0.0; self.b.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatParams {
    pub layer0: GatLayer,
    pub layer1: GatLayer,
}

impl GatParams {
    pub fn init(in_dim: usize, hidden_dim: usize, out_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        Self {
            layer0: GatLayer::init(in_dim, hidden_dim, &mut rng),
            layer1: GatLayer::init(hidden_dim, out_dim, &mut rng),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layer0: self.layer0.zeros_like(),
            layer1: self.layer1.zeros_like(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in [&self.layer0, &self.layer1] {
            flat.extend_from_slice(layer.w.values());
            flat.extend_from_slice(&layer.a_src);
            flat.extend_from_slice(&layer.a_dst);
            flat.extend_from_slice(&layer.b);
        }
        flat
    }

    pub fn from_flat(&self, flat: &[f64]) -> Self {
        let mut it = flat.iter().copied();
        let mut build = |proto: &GatLayer| {
            let mut take = |n: usize| -> Vec<f64> { (0..n).map(|_| it.next().unwrap()).collect() };
            let wv = take(proto.w.rows() * proto.w.cols());
            let a_src = take(proto.a_src.len());
            let a_dst = take(proto.a_dst.len());
            let b = take(proto.b.len());
            let mut w = DenseMatrix::zeros(proto.w.rows(), proto.w.cols());
            w.values_mut().copy_from_slice(&wv);
            GatLayer { w, a_src, a_dst, b }
        };
        let layer0 = build(&self.layer0);
        let layer1 = build(&self.layer1);
        Self { layer0, layer1 }
    }
}

/// Neighborhood lists (self included) and log edge-weight offsets.
pub struct GatStructure {
    nbhd: Vec<Vec<usize>>,
    ln_w: Vec<Vec<f64>>,
}

impl GatStructure {
    pub fn new(g: &CharacterGraph, weighted: bool) -> Self {
        let n = g.node_count();
        let mut nbhd = Vec::with_capacity(n);
        let mut ln_w = Vec::with_capacity(n);
        for u in 0..n {
            let mut ids = vec![u];
            let mut lw = vec![0.0];
            for &(v, w) in g.neighbors(u) {
                ids.push(v);
                lw.push(if weighted { (w as f64).ln() } else { 0.0 });
            }
            nbhd.push(ids);
            ln_w.push(lw);
        }
        Self { nbhd, ln_w }
    }

    pub fn node_count(&self) -> usize {
        self.nbhd.len()
    }
}

/// Per-layer activations retained for the backward pass.
pub struct GatLayerCache {
    transformed: DenseMatrix,     // G = H W
    raw: Vec<Vec<f64>>,           // s_u + t_v before leaky-relu
    pub alpha: Vec<Vec<f64>>,     // attention, rows sum to 1
    pre: DenseMatrix,             // M + b
    pub out: DenseMatrix,
}

pub struct GatCache {
    pub layer0: GatLayerCache,
    pub layer1: GatLayerCache,
}

fn leaky(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

fn leaky_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

fn layer_forward(
    layer: &GatLayer,
    input: &DenseMatrix,
    structure: &GatStructure,
    relu_output: bool,
) -> Result<GatLayerCache> {
    if input.cols() != layer.w.rows() {
        return Err(Error::ShapeMismatch {
            context: "gat layer".into(),
            expected: format!("{} input columns", layer.w.rows()),
            actual: format!("{}", input.cols()),
        });
    }
    let n = input.rows();
    let transformed = input.matmul(&layer.w)?;
    let s: Vec<f64> = (0..n)
        .map(|u| {
            transformed
                .row(u)
                .iter()
                .zip(&layer.a_src)
                .map(|(g, a)| g * a)
                .sum()
        })
        .collect();
    let t: Vec<f64> = (0..n)
        .map(|v| {
            transformed
                .row(v)
                .iter()
                .zip(&layer.a_dst)
                .map(|(g, a)| g * a)
                .sum()
        })
        .collect();

    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut alpha: Vec<Vec<f64>> = Vec::with_capacity(n);
    for u in 0..n {
        let scores: Vec<f64> = structure.nbhd[u].iter().map(|&v| s[u] + t[v]).collect();
        let biased: Vec<f64> = scores
            .iter()
            .zip(&structure.ln_w[u])
            .map(|(&r, &lw)| leaky(r) + lw)
            .collect();
        let max = biased.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = biased.iter().map(|&e| (e - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        alpha.push(exps.into_iter().map(|e| e / total).collect());
        raw.push(scores);
    }

    let out_dim = layer.w.cols();
    let mut pre = DenseMatrix::zeros(n, out_dim);
    for u in 0..n {
        for (k, &v) in structure.nbhd[u].iter().enumerate() {
            let weight = alpha[u][k];
            let src = transformed.row(v);
            let dst = pre.row_mut(u);
            for (d, g) in dst.iter_mut().zip(src) {
                *d += weight * g;
            }
        }
    }
    pre.add_row_broadcast(&layer.b);
    let out = if relu_output {
        pre.map(|v| v.max(0.0))
    } else {
        pre.clone()
    };
    Ok(GatLayerCache {
        transformed,
        raw,
        alpha,
        pre,
        out,
    })
}

/// Returns (parameter gradients, gradient w.r.t. the layer input).
fn layer_backward(
    layer: &GatLayer,
    input: &DenseMatrix,
    structure: &GatStructure,
    cache: &GatLayerCache,
    d_out: &DenseMatrix,
    relu_output: bool,
) -> Result<(GatLayer, DenseMatrix)> {
    let n = input.rows();
    let out_dim = layer.w.cols();

    let mut d_pre = d_out.clone();
    if relu_output {
        for (g, pre) in d_pre.values_mut().iter_mut().zip(cache.pre.values()) {
            if *pre <= 0.0 {
                *g = 0.0;
            }
        }
    }
    let mut d_b = vec![0.0; out_dim];
    for u in 0..n {
        for (s, v) in d_b.iter_mut().zip(d_pre.row(u)) {
            *s += v;
        }
    }

    let mut d_transformed = DenseMatrix::zeros(n, out_dim);
    let mut d_s = vec![0.0f64; n];
    let mut d_t = vec![0.0f64; n];
    for u in 0..n {
        let neighborhood = &structure.nbhd[u];
        // d alpha, then softmax backward to the biased scores.
        let d_alpha: Vec<f64> = neighborhood
            .iter()
            .map(|&v| {
                d_pre
                    .row(u)
                    .iter()
                    .zip(cache.transformed.row(v))
                    .map(|(dp, g)| dp * g)
                    .sum()
            })
            .collect();
        let dot: f64 = cache.alpha[u]
            .iter()
            .zip(&d_alpha)
            .map(|(a, da)| a * da)
            .sum();
        for (k, &v) in neighborhood.iter().enumerate() {
            let d_escore = cache.alpha[u][k] * (d_alpha[k] - dot);
            let d_raw = d_escore * leaky_grad(cache.raw[u][k]);
            d_s[u] += d_raw;
            d_t[v] += d_raw;
            // message aggregation term
            let weight = cache.alpha[u][k];
            let dst = d_transformed.row_mut(v);
            for (d, dp) in dst.iter_mut().zip(d_pre.row(u)) {
                *d += weight * dp;
            }
        }
    }

    let mut d_a_src = vec![0.0; out_dim];
    let mut d_a_dst = vec![0.0; out_dim];
    for u in 0..n {
        let g = cache.transformed.row(u);
        for j in 0..out_dim {
            d_a_src[j] += d_s[u] * g[j];
            d_a_dst[j] += d_t[u] * g[j];
        }
        let dst = d_transformed.row_mut(u);
        for j in 0..out_dim {
            dst[j] += d_s[u] * layer.a_src[j] + d_t[u] * layer.a_dst[j];
        }
    }

    let d_w = input.transpose().matmul(&d_transformed)?;
    let d_input = d_transformed.matmul(&layer.w.transpose())?;
    Ok((
        GatLayer {
            w: d_w,
            a_src: d_a_src,
            a_dst: d_a_dst,
            b: d_b,
        },
        d_input,
    ))
}

/// Hidden layer with relu, output layer linear.
pub fn gat_forward(
    params: &GatParams,
    features: &DenseMatrix,
    structure: &GatStructure,
) -> Result<GatCache> {
    if features.rows() != structure.node_count() {
        return Err(Error::ShapeMismatch {
            context: "gat input".into(),
            expected: format!("{} feature rows", structure.node_count()),
            actual: format!("{}", features.rows()),
        });
    }
    let layer0 = layer_forward(&params.layer0, features, structure, true)?;
    let layer1 = layer_forward(&params.layer1, &layer0.out, structure, false)?;
    Ok(GatCache { layer0, layer1 })
}

pub fn gat_backward(
    params: &GatParams,
    features: &DenseMatrix,
    structure: &GatStructure,
    cache: &GatCache,
    d_output: &DenseMatrix,
) -> Result<GatParams> {
    let (d_layer1, d_hidden) = layer_backward(
        &params.layer1,
        &cache.layer0.out,
        structure,
        &cache.layer1,
        d_output,
        false,
    )?;
    let (d_layer0, _) = layer_backward(
        &params.layer0,
        features,
        structure,
        &cache.layer0,
        &d_hidden,
        true,
    )?;
    Ok(GatParams {
        layer0: d_layer0,
        layer1: d_layer1,
    })
}
