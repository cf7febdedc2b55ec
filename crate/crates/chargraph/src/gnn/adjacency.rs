//! Self-looped symmetric adjacency normalization for message passing.

use crate::graph::CharacterGraph;
use crate::linalg::DenseMatrix;

/// D^(-1/2) (A + I) D^(-1/2) with self-loop weight 1 and D the row sums of
/// A + I. `weighted` selects co-occurrence weights for A, otherwise binary.
pub fn normalize_adjacency(g: &CharacterGraph, weighted: bool) -> DenseMatrix {
    let n = g.node_count();
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        a.set(i, i, 1.0);
    }
    for (u, v, w) in g.edges() {
        let value = if weighted { w as f64 } else { 1.0 };
        a.set(u, v, value);
        a.set(v, u, value);
    }
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| 1.0 / a.row(i).iter().sum::<f64>().sqrt())
        .collect();
    for i in 0..n {
        for j in 0..n {
            let value = a.get(i, j) * inv_sqrt[i] * inv_sqrt[j];
            a.set(i, j, value);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_node_normalizes_to_one() {
        let g = CharacterGraph::from_parts(vec!["A".into()], []).unwrap();
        let m = normalize_adjacency(&g, false);
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn single_edge_gives_all_halves() {
        let g = CharacterGraph::from_weighted_edges([("A".to_string(), "B".to_string(), 1)])
            .unwrap();
        let m = normalize_adjacency(&g, false);
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.get(i, j) - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn output_is_symmetric() {
        let g = CharacterGraph::from_weighted_edges([
            ("A".to_string(), "B".to_string(), 3),
            ("B".to_string(), "C".to_string(), 1),
            ("C".to_string(), "D".to_string(), 7),
        ])
        .unwrap();
        for weighted in [false, true] {
            let m = normalize_adjacency(&g, weighted);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((m.get(i, j) - m.get(j, i)).abs() < 1e-12);
                }
            }
            assert!(m.is_finite());
        }
    }

    #[test]
    fn weights_change_the_normalization() {
        let g = CharacterGraph::from_weighted_edges([
            ("A".to_string(), "B".to_string(), 5),
            ("B".to_string(), "C".to_string(), 1),
        ])
        .unwrap();
        let unweighted = normalize_adjacency(&g, false);
        let weighted = normalize_adjacency(&g, true);
        assert!((unweighted.get(0, 1) - weighted.get(0, 1)).abs() > 1e-9);
    }
}
