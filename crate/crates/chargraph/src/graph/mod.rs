//! Weighted undirected character graphs and network metrics.

mod graphml;
mod layout;
mod metrics;

pub use graphml::{read_graphml, write_graphml};
pub use layout::{layout_fr, layout_to_csv};
pub use metrics::{
    betweenness, conventional_density, degree, density, density_from_counts, mean_degree,
    mean_degree_from_counts, rank_centrality, shortest_path_stats, BetweennessScore,
    CentralityMeasure, PathStats,
};

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cooccur::EdgeList;
use crate::error::{Error, Result};

/// Weighted undirected graph over canonical character ids.
///
/// Node indexing is stable: ids are sorted, and the adjacency is symmetric
/// with no self-loops. The graph is immutable after construction apart from
/// node attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterGraph {
    nodes: Vec<String>,
    adjacency: Vec<Vec<(usize, u64)>>,
    node_attributes: BTreeMap<String, BTreeMap<String, String>>,
}

impl CharacterGraph {
    /// Builds a graph whose node set is exactly the edge endpoints.
    pub fn from_edge_list(edges: &EdgeList) -> Result<Self> {
        Self::from_weighted_edges(edges.entries.iter().cloned())
    }

    pub fn from_weighted_edges(
        edges: impl IntoIterator<Item = (String, String, u64)>,
    ) -> Result<Self> {
        let edges: Vec<(String, String, u64)> = edges.into_iter().collect();
        let mut nodes: Vec<String> = edges
            .iter()
            .flat_map(|(u, v, _)| [u.clone(), v.clone()])
            .collect();
        nodes.sort();
        nodes.dedup();
        Self::from_parts(nodes, edges)
    }

    /// Builds a graph with an explicit node set, which may include isolated
    /// nodes not present in any edge.
    pub fn from_parts(
        mut nodes: Vec<String>,
        edges: impl IntoIterator<Item = (String, String, u64)>,
    ) -> Result<Self> {
        nodes.sort();
        nodes.dedup();
        let index: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if w == 0 {
                return Err(Error::InvalidConfig(format!("zero-weight edge {u}--{v}")));
            }
            let ui = *index
                .get(u.as_str())
                .ok_or_else(|| Error::UnknownNode(u.clone()))?;
            let vi = *index
                .get(v.as_str())
                .ok_or_else(|| Error::UnknownNode(v.clone()))?;
            let key = (ui.min(vi), ui.max(vi));
            *weights.entry(key).or_insert(0) += w;
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (&(u, v), &w) in &weights {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }
        Ok(Self {
            nodes,
            adjacency,
            node_attributes: BTreeMap::new(),
        })
    }

    /// Union of graphs with edge weights summed.
    pub fn merge(graphs: &[CharacterGraph]) -> Result<CharacterGraph> {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut attributes: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for g in graphs {
            nodes.extend(g.nodes.iter().cloned());
            edges.extend(
                g.edges()
                    .map(|(u, v, w)| (g.nodes[u].clone(), g.nodes[v].clone(), w)),
            );
            for (id, attrs) in &g.node_attributes {
                attributes.entry(id.clone()).or_default().extend(
                    attrs.iter().map(|(k, v)| (k.clone(), v.clone())),
                );
            }
        }
        let mut merged = Self::from_parts(nodes, edges)?;
        merged.node_attributes = attributes;
        Ok(merged)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    pub fn neighbors(&self, idx: usize) -> &[(usize, u64)] {
        &self.adjacency[idx]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search_by_key(&v, |&(n, _)| n).is_ok()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<u64> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|k| self.adjacency[u][k].1)
    }

    /// Iterates undirected edges once, as `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, neighbors)| {
                neighbors
                    .iter()
                    .filter(move |&&(v, _)| u < v)
                    .map(move |&(v, w)| (u, v, w))
            })
    }

    pub fn set_attribute(&mut self, id: &str, key: &str, value: &str) -> Result<()> {
        if self.index_of(id).is_none() {
            return Err(Error::UnknownNode(id.to_string()));
        }
        self.node_attributes
            .entry(id.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn attributes(&self, id: &str) -> Option<&BTreeMap<String, String>> {
        self.node_attributes.get(id)
    }

    pub fn node_attributes(&self) -> &BTreeMap<String, BTreeMap<String, String>> {
        &self.node_attributes
    }

    /// Connected components as sorted node-index lists, largest first; ties
    /// broken by smallest member index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut queue = std::collections::VecDeque::from([start]);
            seen[start] = true;
            let mut component = vec![start];
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        component.push(u);
                        queue.push_back(u);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
        components
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }

    /// Induced subgraph on the given node indices; attributes carried over.
    pub fn subgraph(&self, node_indices: &[usize]) -> Result<CharacterGraph> {
        let keep: std::collections::BTreeSet<usize> = node_indices.iter().copied().collect();
        let nodes: Vec<String> = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        let edges = self
            .edges()
            .filter(|(u, v, _)| keep.contains(u) && keep.contains(v))
            .map(|(u, v, w)| (self.nodes[u].clone(), self.nodes[v].clone(), w));
        let mut sub = CharacterGraph::from_parts(nodes.clone(), edges)?;
        for id in &nodes {
            if let Some(attrs) = self.node_attributes.get(id) {
                sub.node_attributes.insert(id.clone(), attrs.clone());
            }
        }
        Ok(sub)
    }

    /// Induced subgraph on the largest connected component.
    pub fn largest_component(&self) -> Result<CharacterGraph> {
        if self.node_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let components = self.components();
        self.subgraph(&components[0])
    }

    /// Writes the edge list as CSV rows `u,v,weight`.
    pub fn edges_to_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["u", "v", "weight"])?;
        for (u, v, weight) in self.edges() {
            w.write_record([self.id(u), self.id(v), &weight.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccur::CooccurrenceStrategy;

    fn edge_list(entries: &[(&str, &str, u64)]) -> EdgeList {
        EdgeList {
            entries: entries
                .iter()
                .map(|(u, v, w)| (u.to_string(), v.to_string(), *w))
                .collect(),
            strategy: CooccurrenceStrategy::Sentence {
                count_multiplicity: false,
            },
        }
    }

    #[test]
    fn single_edge_graph() {
        let g = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 3)])).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(3));
    }

    #[test]
    fn empty_edge_list_gives_empty_graph() {
        let g = CharacterGraph::from_edge_list(&edge_list(&[])).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn self_loop_is_an_error() {
        let err = CharacterGraph::from_edge_list(&edge_list(&[("A", "A", 1)])).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(_)));
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g =
            CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 2), ("B", "C", 5)])).unwrap();
        for (u, v, w) in g.edges() {
            assert_eq!(g.edge_weight(v, u), Some(w));
        }
    }

    #[test]
    fn merge_sums_weights() {
        let a = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 1)])).unwrap();
        let b = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 2)])).unwrap();
        let merged = CharacterGraph::merge(&[a, b]).unwrap();
        assert_eq!(merged.edge_weight(0, 1), Some(3));
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let a = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 1), ("B", "C", 4)])).unwrap();
        let empty = CharacterGraph::from_edge_list(&edge_list(&[])).unwrap();
        let merged = CharacterGraph::merge(&[a.clone(), empty]).unwrap();
        assert_eq!(merged, a);
    }

    #[test]
    fn merge_of_disjoint_graphs_is_disjoint_union() {
        let a = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 1)])).unwrap();
        let b = CharacterGraph::from_edge_list(&edge_list(&[("C", "D", 2)])).unwrap();
        let merged = CharacterGraph::merge(&[a, b]).unwrap();
        assert_eq!(merged.node_count(), 4);
        assert_eq!(merged.edge_count(), 2);
        assert_eq!(merged.components().len(), 2);
    }

    #[test]
    fn merge_is_commutative_and_associative() {
        let a = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 1), ("B", "C", 2)])).unwrap();
        let b = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 3), ("C", "D", 1)])).unwrap();
        let c = CharacterGraph::from_edge_list(&edge_list(&[("D", "E", 7)])).unwrap();
        let abc = CharacterGraph::merge(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let cba = CharacterGraph::merge(&[c.clone(), b.clone(), a.clone()]).unwrap();
        assert_eq!(abc, cba);
        let ab = CharacterGraph::merge(&[a, b]).unwrap();
        let ab_c = CharacterGraph::merge(&[ab, c]).unwrap();
        assert_eq!(abc, ab_c);
    }

    #[test]
    fn largest_component_keeps_triangle() {
        let g = CharacterGraph::from_edge_list(&edge_list(&[
            ("A", "B", 1),
            ("B", "C", 1),
            ("A", "C", 1),
            ("X", "Y", 1),
        ]))
        .unwrap();
        let lc = g.largest_component().unwrap();
        assert_eq!(lc.nodes(), ["A", "B", "C"]);
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let g = CharacterGraph::from_edge_list(&edge_list(&[("A", "B", 1), ("B", "C", 2)])).unwrap();
        assert_eq!(g.largest_component().unwrap(), g);
    }

    #[test]
    fn component_tie_break_prefers_lexicographically_first() {
        let g = CharacterGraph::from_edge_list(&edge_list(&[("C", "D", 1), ("A", "B", 1)])).unwrap();
        let lc = g.largest_component().unwrap();
        assert_eq!(lc.nodes(), ["A", "B"]);
    }

    #[test]
    fn isolated_node_has_degree_zero() {
        let g = CharacterGraph::from_parts(
            vec!["A".into(), "B".into(), "Z".into()],
            [("A".to_string(), "B".to_string(), 1)],
        )
        .unwrap();
        let z = g.index_of("Z").unwrap();
        assert!(g.neighbors(z).is_empty());
    }
}
