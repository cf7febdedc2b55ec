//! Fruchterman-Reingold force-directed layout.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::graph::CharacterGraph;

/// Force-directed layout on the unit square with linear cooling.
///
/// Ideal spring length is `sqrt(area / n)`. Positions are seeded, the final
/// layout is centered on its centroid, and repeated runs with the same seed
/// are identical.
pub fn layout_fr(g: &CharacterGraph, iterations: usize, seed: u64) -> Vec<(f64, f64)> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let iterations = iterations.max(1);
    let k = (1.0 / n as f64).sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();

    let t0 = 0.1;
    let dt = t0 / (iterations as f64 + 1.0);
    let mut temperature = t0;
    let mut disp = vec![(0.0f64, 0.0f64); n];

    for _ in 0..iterations {
        for d in &mut disp {
            *d = (0.0, 0.0);
        }
        // Repulsion between all pairs.
        for v in 0..n {
            for u in (v + 1)..n {
                let dx = pos[v].0 - pos[u].0;
                let dy = pos[v].1 - pos[u].1;
                let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
                let force = k * k / dist;
                let (fx, fy) = (dx / dist * force, dy / dist * force);
                disp[v].0 += fx;
                disp[v].1 += fy;
                disp[u].0 -= fx;
                disp[u].1 -= fy;
            }
        }
        // Attraction along edges.
        for (u, v, _) in g.edges() {
            let dx = pos[u].0 - pos[v].0;
            let dy = pos[u].1 - pos[v].1;
            let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
            let force = dist * dist / k;
            let (fx, fy) = (dx / dist * force, dy / dist * force);
            disp[u].0 -= fx;
            disp[u].1 -= fy;
            disp[v].0 += fx;
            disp[v].1 += fy;
        }
        // Displace, capped by the current temperature.
        for v in 0..n {
            let (dx, dy) = disp[v];
            let len = (dx * dx + dy * dy).sqrt();
            if len > 1e-12 {
                let step = len.min(temperature);
                pos[v].0 += dx / len * step;
                pos[v].1 += dy / len * step;
            }
        }
        temperature -= dt;
    }

    let cx = pos.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = pos.iter().map(|p| p.1).sum::<f64>() / n as f64;
    pos.iter().map(|&(x, y)| (x - cx, y - cy)).collect()
}

/// Writes rows `node,x,y` in node order.
pub fn layout_to_csv<W: Write>(
    g: &CharacterGraph,
    layout: &[(f64, f64)],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["node", "x", "y"])?;
    for (idx, (x, y)) in layout.iter().enumerate() {
        w.write_record([g.id(idx), &format!("{x}"), &format!("{y}")])?;
    }
    w.flush()?;
    Ok(())
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
    fn single_node_sits_at_origin() {
        let g = CharacterGraph::from_parts(vec!["A".into()], []).unwrap();
        let layout = layout_fr(&g, 10, 7);
        assert_eq!(layout, vec![(0.0, 0.0)]);
    }

    #[test]
    fn two_connected_nodes_settle_near_spring_length() {
        let g = graph(&[("A", "B")]);
        let layout = layout_fr(&g, 500, 42);
        let k = (1.0f64 / 2.0).sqrt();
        let d = ((layout[0].0 - layout[1].0).powi(2) + (layout[0].1 - layout[1].1).powi(2)).sqrt();
        assert!(d >= 0.5 * k && d <= 2.0 * k, "distance {d} vs k {k}");
    }

    #[test]
    fn same_seed_gives_identical_layout() {
        let g = graph(&[("A", "B"), ("B", "C"), ("C", "A"), ("C", "D")]);
        assert_eq!(layout_fr(&g, 50, 99), layout_fr(&g, 50, 99));
    }

    #[test]
    fn coordinates_are_finite() {
        let g = graph(&[("A", "B"), ("B", "C"), ("C", "D"), ("D", "A"), ("A", "C")]);
        for (x, y) in layout_fr(&g, 100, 3) {
            assert!(x.is_finite() && y.is_finite());
        }
    }
}
