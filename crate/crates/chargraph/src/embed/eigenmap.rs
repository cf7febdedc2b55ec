//! Laplacian eigenmap embeddings from the symmetric normalized Laplacian.

use crate::embed::{EmbeddingMatrix, Provenance};
use crate::error::{Error, Result};
use crate::graph::CharacterGraph;
use crate::linalg::{symmetric_eigen, DenseMatrix};

/// Eigenvalues below this are treated as the Laplacian null space.
const ZERO_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EigenmapResult {
    pub embedding: EmbeddingMatrix,
    /// The `dim` smallest nonzero eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// True when the graph was disconnected and the embedding covers only
    /// the largest component.
    pub used_largest_component: bool,
}

/// L = I - D^(-1/2) A D^(-1/2) on the given graph.
pub fn normalized_laplacian(g: &CharacterGraph, weighted: bool) -> DenseMatrix {
    let n = g.node_count();
    let degree: Vec<f64> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(_, w)| if weighted { w as f64 } else { 1.0 })
                .sum()
        })
        .collect();
    let inv_sqrt: Vec<f64> = degree
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut lap = DenseMatrix::identity(n);
    for (u, v, w) in g.edges() {
        let a = if weighted { w as f64 } else { 1.0 };
        let value = a * inv_sqrt[u] * inv_sqrt[v];
        lap.add_to(u, v, -value);
        lap.add_to(v, u, -value);
    }
    lap
}

/// Embeds nodes with eigenvectors of the `dim` smallest nonzero eigenvalues
/// of the symmetric normalized Laplacian.
///
/// Disconnected graphs fall back to the largest component (flagged). Every
/// returned eigenpair is residual-checked, and eigenvector signs follow the
/// first-nonzero-positive convention.
pub fn laplacian_eigenmap(g: &CharacterGraph, dim: usize, weighted: bool) -> Result<EigenmapResult> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let reduced;
    let (target, used_largest_component) = if g.is_connected() {
        (g, false)
    } else {
        reduced = g.largest_component()?;
        (&reduced, true)
    };
    let n = target.node_count();
    if dim >= n {
        return Err(Error::DimensionTooLarge { dim, nodes: n });
    }

    let lap = normalized_laplacian(target, weighted);
    let eig = symmetric_eigen(&lap)?;

    let mut vectors = DenseMatrix::zeros(n, dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut taken = 0;
    for col in 0..n {
        let value = eig.values[col];
        if value.abs() < ZERO_TOL {
            continue;
        }
        if taken == dim {
            break;
        }
        let mut vector: Vec<f64> = (0..n).map(|i| eig.vectors.get(i, col)).collect();
        if let Some(first) = vector.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                vector.iter_mut().for_each(|v| *v = -*v);
            }
        }
        // Residual check: || L v - lambda v ||_inf
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut lv = 0.0;
            for k in 0..n {
                lv += lap.get(i, k) * vector[k];
            }
            residual = residual.max((lv - value * vector[i]).abs());
        }
        if residual >= RESIDUAL_TOL {
            return Err(Error::InvalidConfig(format!(
                "eigensolver residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e} at eigenvalue {value}"
            )));
        }
        for (i, v) in vector.iter().enumerate() {
            vectors.set(i, taken, *v);
        }
        eigenvalues.push(value);
        taken += 1;
    }
    if taken < dim {
        return Err(Error::DimensionTooLarge { dim, nodes: n });
    }

    let embedding = EmbeddingMatrix::new(
        target.nodes().to_vec(),
        vectors,
        Provenance::LaplacianEigenmap,
        serde_json::json!({ "dim": dim, "weighted": weighted }),
    );
    Ok(EigenmapResult {
        embedding,
        eigenvalues,
        used_largest_component,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> CharacterGraph {
        CharacterGraph::from_weighted_edges(
            edges
                .iter()
                .map(|(u, v)| (u.to_string(), v.to_string(), 1u64)),
        )
        .unwrap()
    }

    #[test]
    fn triangle_nonzero_eigenvalues_are_three_halves() {
        let k3 = graph(&[("A", "B"), ("B", "C"), ("A", "C")]);
        let result = laplacian_eigenmap(&k3, 2, false).unwrap();
        for value in &result.eigenvalues {
            assert!((value - 1.5).abs() < 1e-9, "eigenvalue {value}");
        }
        assert!(!result.used_largest_component);
    }

    #[test]
    fn null_space_is_excluded() {
        let k3 = graph(&[("A", "B"), ("B", "C"), ("A", "C")]);
        let lap = normalized_laplacian(&k3, false);
        let eig = symmetric_eigen(&lap).unwrap();
        assert!(eig.values[0].abs() < 1e-9, "smallest eigenvalue is 0");
        // The embedding skips it.
        let result = laplacian_eigenmap(&k3, 2, false).unwrap();
        assert!(result.eigenvalues.iter().all(|v| v.abs() > 1e-9));
    }

    #[test]
    fn disconnected_graph_uses_largest_component() {
        // Two disjoint triangles: the full Laplacian has eigenvalue 0 twice.
        let g = graph(&[
            ("A", "B"),
            ("B", "C"),
            ("A", "C"),
            ("X", "Y"),
            ("Y", "Z"),
            ("X", "Z"),
        ]);
        let lap = normalized_laplacian(&g, false);
        let eig = symmetric_eigen(&lap).unwrap();
        assert!(eig.values[1].abs() < 1e-9, "zero eigenvalue multiplicity 2");

        let result = laplacian_eigenmap(&g, 2, false).unwrap();
        assert!(result.used_largest_component);
        assert_eq!(result.embedding.len(), 3);
    }

    #[test]
    fn dim_must_be_below_node_count() {
        let k3 = graph(&[("A", "B"), ("B", "C"), ("A", "C")]);
        assert!(matches!(
            laplacian_eigenmap(&k3, 3, false),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn eigen_residuals_hold_on_a_bigger_graph() {
        // Wheel-ish graph: cycle plus hub.
        let mut edges = Vec::new();
        for i in 0..12 {
            edges.push((format!("n{i}"), format!("n{}", (i + 1) % 12), 1u64));
            edges.push(("hub".to_string(), format!("n{i}"), 1u64));
        }
        let g = CharacterGraph::from_weighted_edges(edges).unwrap();
        let result = laplacian_eigenmap(&g, 5, false).unwrap();
        assert_eq!(result.eigenvalues.len(), 5);
        assert!(result.embedding.is_finite());
        for w in result.eigenvalues.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "eigenvalues ascend");
        }
    }

    #[test]
    fn weighted_and_unweighted_differ() {
        let g = CharacterGraph::from_weighted_edges([
            ("A".to_string(), "B".to_string(), 10),
            ("B".to_string(), "C".to_string(), 1),
            ("A".to_string(), "C".to_string(), 1),
        ])
        .unwrap();
        let unweighted = laplacian_eigenmap(&g, 1, false).unwrap();
        let weighted = laplacian_eigenmap(&g, 1, true).unwrap();
        assert!((unweighted.eigenvalues[0] - weighted.eigenvalues[0]).abs() > 1e-6);
    }
}
