//! Multinomial logistic regression trained with the adaptive-moment
//! optimizer. Binary problems are the two-class case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::adam::{adam_step, AdamConfig, AdamState};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.01,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// d x k weights.
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub n_classes: usize,
}

impl LogisticModel {
    pub fn zeros(dim: usize, n_classes: usize) -> Self {
        Self {
            weights: DenseMatrix::zeros(dim, n_classes),
            bias: vec![0.0; n_classes],
            n_classes,
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.weights.values().to_vec();
        flat.extend_from_slice(&self.bias);
        flat
    }

    pub fn from_flat(&self, flat: &[f64]) -> Self {
        let wlen = self.weights.rows() * self.weights.cols();
        let mut weights = DenseMatrix::zeros(self.weights.rows(), self.weights.cols());
        weights.values_mut().copy_from_slice(&flat[..wlen]);
        Self {
            weights,
            bias: flat[wlen..].to_vec(),
            n_classes: self.n_classes,
        }
    }
}

pub fn softmax_rows(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    out
}

/// Mean cross-entropy and its gradient w.r.t. the logits.
pub fn cross_entropy(logits: &DenseMatrix, labels: &[usize]) -> (f64, DenseMatrix) {
    let probs = softmax_rows(logits);
    let n = labels.len() as f64;
    let mut loss = 0.0;
    let mut grad = probs.clone();
    for (i, &label) in labels.iter().enumerate() {
        loss -= probs.get(i, label).max(1e-300).ln();
        grad.add_to(i, label, -1.0);
    }
    grad.scale(1.0 / n);
    (loss / n, grad)
}

/// Full-batch training; deterministic (zero init, fixed iteration order).
pub fn logistic_fit(
    features: &DenseMatrix,
    labels: &[usize],
    config: &LogisticConfig,
) -> Result<LogisticModel> {
    if features.rows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.rows(),
            right: labels.len(),
        });
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    {
        let mut seen = vec![false; n_classes];
        for &l in labels {
            seen[l] = true;
        }
        if seen.iter().filter(|s| **s).count() < 2 {
            return Err(Error::SingleClass(
                labels.first().map_or_else(String::new, |l| l.to_string()),
            ));
        }
    }
    let dim = features.cols();
    let mut model = LogisticModel::zeros(dim, n_classes);
    let adam = AdamConfig::with_lr(config.learning_rate);
    let mut w_state = AdamState::new(dim * n_classes);
    let mut b_state = AdamState::new(n_classes);
    let features_t = features.transpose();

    for _ in 0..config.epochs {
        let mut logits = features.matmul(&model.weights)?;
        logits.add_row_broadcast(&model.bias);
        let (_, d_logits) = cross_entropy(&logits, labels);
        let mut d_w = features_t.matmul(&d_logits)?;
        if config.l2 > 0.0 {
            let mut reg = model.weights.clone();
            reg.scale(config.l2);
            d_w.add_assign(&reg);
        }
        let mut d_b = vec![0.0; n_classes];
        for i in 0..d_logits.rows() {
            for (s, v) in d_b.iter_mut().zip(d_logits.row(i)) {
                *s += v;
            }
        }
        adam_step("weights", model.weights.values_mut(), d_w.values(), &mut w_state, &adam)?;
        adam_step("bias", &mut model.bias, &d_b, &mut b_state, &adam)?;
    }
    Ok(model)
}

/// Class probabilities, one row per input; rows sum to 1.
pub fn logistic_predict(model: &LogisticModel, features: &DenseMatrix) -> Result<DenseMatrix> {
    if features.cols() != model.weights.rows() {
        return Err(Error::ShapeMismatch {
            context: "logistic predict".into(),
            expected: format!("{} feature columns", model.weights.rows()),
            actual: format!("{}", features.cols()),
        });
    }
    let mut logits = features.matmul(&model.weights)?;
    logits.add_row_broadcast(&model.bias);
    Ok(softmax_rows(&logits))
}

pub fn predict_classes(probabilities: &DenseMatrix) -> Vec<usize> {
    (0..probabilities.rows())
        .map(|i| {
            let row = probabilities.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_data_reaches_full_training_accuracy() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let jitter = (i as f64) * 0.01;
            rows.push(vec![1.0 + jitter, 2.0 - jitter]);
            labels.push(0);
            rows.push(vec![-1.0 - jitter, -2.0 + jitter]);
            labels.push(1);
        }
        let features = DenseMatrix::from_rows(rows);
        let config = LogisticConfig {
            learning_rate: 0.1,
            ..Default::default()
        };
        let model = logistic_fit(&features, &labels, &config).unwrap();
        let probs = logistic_predict(&model, &features).unwrap();
        let predictions = predict_classes(&probs);
        assert_eq!(predictions, labels);
    }

    #[test]
    fn zero_model_predicts_uniformly() {
        let model = LogisticModel::zeros(3, 4);
        let features = DenseMatrix::from_rows(vec![vec![0.3, -0.7, 2.0]]);
        let probs = logistic_predict(&model, &features).unwrap();
        for j in 0..4 {
            assert!((probs.get(0, j) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn probability_rows_sum_to_one() {
        let features = DenseMatrix::from_rows(vec![
            vec![0.5, 1.5],
            vec![-2.0, 0.25],
            vec![3.0, -1.0],
        ]);
        let labels = vec![0, 1, 2];
        let model = logistic_fit(&features, &labels, &LogisticConfig::default()).unwrap();
        let probs = logistic_predict(&model, &features).unwrap();
        for i in 0..probs.rows() {
            let total: f64 = probs.row(i).iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_class_is_an_error() {
        let features = DenseMatrix::from_rows(vec![vec![1.0], vec![2.0]]);
        assert!(matches!(
            logistic_fit(&features, &[1, 1], &LogisticConfig::default()),
            Err(Error::SingleClass(_))
        ));
    }
}
