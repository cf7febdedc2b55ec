//! Latent-space representations: skipgram word and node embeddings,
//! Laplacian eigenmaps, and a PCA projection for plot data.

mod eigenmap;
mod node2vec;
mod skipgram;

pub use eigenmap::{laplacian_eigenmap, EigenmapResult};
pub use node2vec::{node2vec, node2vec_walks, transition_distribution, Node2vecConfig, WalkConfig};
pub use skipgram::{skipgram_train, word_embeddings, SkipgramConfig, SkipgramResult, WordEmbeddingConfig};

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    WordContext,
    Node2vec,
    LaplacianEigenmap,
    GnnHidden,
}

/// Per-entity latent vectors with provenance and the config that made them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub entity_ids: Vec<String>,
    /// `entity_ids.len()` x `dim`.
    pub vectors: DenseMatrix,
    pub dim: usize,
    pub provenance: Provenance,
    pub config: serde_json::Value,
}

impl EmbeddingMatrix {
    pub fn new(
        entity_ids: Vec<String>,
        vectors: DenseMatrix,
        provenance: Provenance,
        config: serde_json::Value,
    ) -> Self {
        debug_assert_eq!(entity_ids.len(), vectors.rows());
        let dim = vectors.cols();
        Self {
            entity_ids,
            vectors,
            dim,
            provenance,
            config,
        }
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.entity_ids.iter().position(|e| e == id)
    }

    pub fn vector(&self, id: &str) -> Option<&[f64]> {
        self.index_of(id).map(|i| self.vectors.row(i))
    }

    pub fn is_finite(&self) -> bool {
        self.vectors.is_finite()
    }

    /// CSV rows `entity_id,v1,...,vd`; values round-trip losslessly.
    pub fn to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["entity_id".to_string()];
        header.extend((1..=self.dim).map(|i| format!("v{i}")));
        w.write_record(&header)?;
        for (i, id) in self.entity_ids.iter().enumerate() {
            let mut record = vec![id.clone()];
            record.extend(self.vectors.row(i).iter().map(|v| format!("{v}")));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(
        reader: R,
        provenance: Provenance,
        config: serde_json::Value,
    ) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut entity_ids = Vec::new();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let mut fields = record.iter();
            let id = fields.next().ok_or_else(|| Error::MalformedInput {
                format: "embedding CSV",
                detail: "empty row".into(),
            })?;
            let values: Vec<f64> = fields
                .map(|f| {
                    f.parse().map_err(|_| Error::MalformedInput {
                        format: "embedding CSV",
                        detail: format!("bad value '{f}'"),
                    })
                })
                .collect::<Result<_>>()?;
            entity_ids.push(id.to_string());
            rows.push(values);
        }
        if rows.is_empty() {
            return Err(Error::MalformedInput {
                format: "embedding CSV",
                detail: "no rows".into(),
            });
        }
        Ok(Self::new(
            entity_ids,
            DenseMatrix::from_rows(rows),
            provenance,
            config,
        ))
    }
}

/// Re-indexes an embedding onto `entity_ids`, zero-filling entities the
/// embedding lacks (e.g. nodes outside the largest component after an
/// eigenmap fallback).
pub fn pad_missing(embedding: &EmbeddingMatrix, entity_ids: &[String]) -> EmbeddingMatrix {
    let mut vectors = DenseMatrix::zeros(entity_ids.len(), embedding.dim);
    for (row, id) in entity_ids.iter().enumerate() {
        if let Some(values) = embedding.vector(id) {
            vectors.row_mut(row).copy_from_slice(values);
        }
    }
    EmbeddingMatrix::new(
        entity_ids.to_vec(),
        vectors,
        embedding.provenance,
        embedding.config.clone(),
    )
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// PCA projection onto the top two principal components of the mean-centered
/// vectors. Deterministic: component signs follow the first-nonzero-positive
/// convention.
pub fn project_2d(embedding: &EmbeddingMatrix) -> Result<Vec<(String, (f64, f64))>> {
    let n = embedding.len();
    if n < 2 {
        return Err(Error::TooFewEntities(n));
    }
    let d = embedding.dim;
    if d < 2 {
        return Err(Error::ShapeMismatch {
            context: "project_2d".into(),
            expected: "dim >= 2".into(),
            actual: format!("{d}"),
        });
    }
    let mut centered = embedding.vectors.clone();
    for j in 0..d {
        let mean: f64 = (0..n).map(|i| centered.get(i, j)).sum::<f64>() / n as f64;
        for i in 0..n {
            centered.add_to(i, j, -mean);
        }
    }
    let cov = centered.transpose().matmul(&centered)?;
    let eig = symmetric_eigen(&cov)?;
    // Largest eigenvalues sit at the end of the ascending spectrum.
    let mut components = Vec::new();
    for &col in &[d - 1, d - 2] {
        let mut component: Vec<f64> = (0..d).map(|i| eig.vectors.get(i, col)).collect();
        if let Some(first) = component.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                for v in &mut component {
                    *v = -*v;
                }
            }
        }
        components.push(component);
    }
    Ok(embedding
        .entity_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let row = centered.row(i);
            let x: f64 = row.iter().zip(&components[0]).map(|(a, b)| a * b).sum();
            let y: f64 = row.iter().zip(&components[1]).map(|(a, b)| a * b).sum();
            (id.clone(), (x, y))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn embedding(rows: Vec<Vec<f64>>) -> EmbeddingMatrix {
        let ids = (0..rows.len()).map(|i| format!("e{i}")).collect();
        EmbeddingMatrix::new(
            ids,
            DenseMatrix::from_rows(rows),
            Provenance::Node2vec,
            serde_json::json!({}),
        )
    }

    #[test]
    fn csv_round_trip() {
        let e = embedding(vec![vec![0.25, -1.5, 3.0], vec![1e-7, 2.0, -0.125]]);
        let mut buf = Vec::new();
        e.to_csv(&mut buf).unwrap();
        let restored =
            EmbeddingMatrix::from_csv(&buf[..], Provenance::Node2vec, serde_json::json!({}))
                .unwrap();
        assert_eq!(e, restored);
    }

    #[test]
    fn projection_of_2d_input_preserves_distances() {
        let e = embedding(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![-0.5, 2.0],
            vec![3.0, -1.0],
        ]);
        let coords = project_2d(&e).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let orig = {
                    let (a, b) = (e.vectors.row(i), e.vectors.row(j));
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
                };
                let proj = {
                    let (a, b) = (coords[i].1, coords[j].1);
                    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
                };
                assert!((orig - proj).abs() < 1e-9, "{orig} vs {proj}");
            }
        }
    }

    #[test]
    fn identical_vectors_project_to_origin() {
        let e = embedding(vec![vec![1.0, 2.0, 3.0]; 5]);
        for (_, (x, y)) in project_2d(&e).unwrap() {
            assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_entities_is_an_error() {
        let e = embedding(vec![vec![1.0, 2.0]]);
        assert!(matches!(project_2d(&e), Err(Error::TooFewEntities(1))));
    }

    #[test]
    fn top_two_components_beat_random_projections() {
        // Deterministic 20-D cloud with anisotropic variance.
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..20).map(|j| next() * (1.0 + j as f64)).collect())
            .collect();
        let e = embedding(rows);
        let coords = project_2d(&e).unwrap();
        let pca_var: f64 = coords.iter().map(|(_, (x, y))| x * x + y * y).sum();

        // Mean-centered data for the random projections.
        let n = e.len();
        let d = e.dim;
        let mut centered = e.vectors.clone();
        for j in 0..d {
            let mean: f64 = (0..n).map(|i| centered.get(i, j)).sum::<f64>() / n as f64;
            for i in 0..n {
                centered.add_to(i, j, -mean);
            }
        }
        for _ in 0..100 {
            // Random orthonormal 2-frame via Gram-Schmidt.
            let mut a: Vec<f64> = (0..d).map(|_| next()).collect();
            let mut b: Vec<f64> = (0..d).map(|_| next()).collect();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            a.iter_mut().for_each(|x| *x /= na);
            let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            b.iter_mut().zip(&a).for_each(|(y, x)| *y -= ab * x);
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            b.iter_mut().for_each(|x| *x /= nb);
            let mut var = 0.0;
            for i in 0..n {
                let row = centered.row(i);
                let x: f64 = row.iter().zip(&a).map(|(p, q)| p * q).sum();
                let y: f64 = row.iter().zip(&b).map(|(p, q)| p * q).sum();
                var += x * x + y * y;
            }
            assert!(pca_var + 1e-9 >= var, "random frame captured more variance");
        }
    }
}
