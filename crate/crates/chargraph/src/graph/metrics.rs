//! Social-network metrics: density, degrees, shortest paths, betweenness.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CharacterGraph;

/// Density with each undirected edge counted once against ordered pairs,
/// i.e. m / (n (n - 1)). See also [`conventional_density`].
pub fn density_from_counts(n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::MetricUndefined {
            metric: "density",
            nodes: n,
        });
    }
    Ok(m as f64 / (n as f64 * (n as f64 - 1.0)))
}

pub fn density(g: &CharacterGraph) -> Result<f64> {
    density_from_counts(g.node_count(), g.edge_count())
}

/// The usual undirected density 2m / (n (n - 1)).
pub fn conventional_density(g: &CharacterGraph) -> Result<f64> {
    density(g).map(|d| 2.0 * d)
}

pub fn mean_degree_from_counts(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::MetricUndefined {
            metric: "mean degree",
            nodes: 0,
        });
    }
    Ok(2.0 * m as f64 / n as f64)
}

/// Unweighted degree: the number of distinct neighbors.
pub fn degree(g: &CharacterGraph, id: &str) -> Result<usize> {
    let idx = g
        .index_of(id)
        .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
    Ok(g.neighbors(idx).len())
}

pub fn mean_degree(g: &CharacterGraph) -> Result<f64> {
    mean_degree_from_counts(g.node_count(), g.edge_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub diameter: usize,
    pub avg_shortest_path: f64,
    /// True when the graph was disconnected and stats were computed on the
    /// largest component.
    pub largest_component_only: bool,
}

/// BFS distances from `source`; `usize::MAX` marks unreachable nodes.
fn bfs_distances(g: &CharacterGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Diameter and average shortest path over unordered node pairs.
///
/// Disconnected graphs fall back to the largest component, flagged in the
/// result.
pub fn shortest_path_stats(g: &CharacterGraph) -> Result<PathStats> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let reduced;
    let (target, flagged) = if g.is_connected() {
        (g, false)
    } else {
        reduced = g.largest_component()?;
        (&reduced, true)
    };
    let n = target.node_count();
    if n < 2 {
        return Ok(PathStats {
            diameter: 0,
            avg_shortest_path: 0.0,
            largest_component_only: flagged,
        });
    }
    let mut diameter = 0usize;
    let mut total = 0u64;
    let mut pairs = 0u64;
    for source in 0..n {
        let dist = bfs_distances(target, source);
        for (v, &d) in dist.iter().enumerate().skip(source + 1) {
            debug_assert!(d != usize::MAX, "component is connected");
            let _ = v;
            diameter = diameter.max(d);
            total += d as u64;
            pairs += 1;
        }
    }
    Ok(PathStats {
        diameter,
        avg_shortest_path: total as f64 / pairs as f64,
        largest_component_only: flagged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetweennessScore {
    /// Shortest-path pass-through count; endpoints excluded, each unordered
    /// pair counted once.
    pub raw: f64,
    /// Raw value divided by (n-1)(n-2)/2.
    pub normalized: f64,
}

/// Brandes' accumulation over BFS shortest-path DAGs, per node index.
pub fn betweenness(g: &CharacterGraph) -> Vec<BetweennessScore> {
    let n = g.node_count();
    let mut raw = vec![0.0f64; n];

    for s in 0..n {
        let mut stack: Vec<usize> = Vec::new();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, _) in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                raw[w] += delta[w];
            }
        }
    }

    // Each unordered pair was visited from both endpoints.
    let norm = if n >= 3 {
        2.0 / ((n - 1) as f64 * (n - 2) as f64)
    } else {
        0.0
    };
    raw.iter()
        .map(|&b| BetweennessScore {
            raw: b / 2.0,
            normalized: b / 2.0 * norm,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityMeasure {
    Degree,
    Betweenness,
}

/// Top-`k` nodes by the chosen measure, descending; ties break
/// lexicographically by id.
pub fn rank_centrality(g: &CharacterGraph, measure: CentralityMeasure, k: usize) -> Vec<String> {
    let values: Vec<f64> = match measure {
        CentralityMeasure::Degree => (0..g.node_count())
            .map(|v| g.neighbors(v).len() as f64)
            .collect(),
        CentralityMeasure::Betweenness => betweenness(g).iter().map(|b| b.raw).collect(),
    };
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap()
            .then_with(|| g.id(a).cmp(g.id(b)))
    });
    order.truncate(k);
    order.into_iter().map(|i| g.id(i).to_string()).collect()
}
