//! Synthetic power-law graphs for offline experiments.

use rand::Rng;
use rand::SeedableRng;

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::seed::ProtocolRng;

/// Barabási–Albert preferential attachment: a clique on `edges_per_node + 1`
/// seed nodes, then every new node links to `edges_per_node` distinct
/// existing nodes chosen with probability proportional to degree.
pub fn preferential_attachment(nodes: usize, edges_per_node: usize, seed: u64) -> Result<Graph> {
    if edges_per_node < 1 || nodes <= edges_per_node {
        return Err(invalid(format!(
            "need nodes > edges_per_node >= 1, got {nodes} and {edges_per_node}"
        )));
    }
    let mut rng = ProtocolRng::seed_from_u64(seed);
    let core = edges_per_node + 1;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(nodes * edges_per_node);
    // one entry per edge endpoint, so uniform picks are degree-proportional
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * nodes * edges_per_node);
    for a in 0..core as u32 {
        for b in a + 1..core as u32 {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(edges_per_node);
    for v in core as u32..nodes as u32 {
        targets.clear();
        while targets.len() < edges_per_node {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::from_edges(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let g = preferential_attachment(2000, 3, 7).unwrap();
        assert_eq!(g.node_count(), 2000);
        assert_eq!(g.edge_count(), 6 + 3 * (2000 - 4));
        assert_eq!(g, preferential_attachment(2000, 3, 7).unwrap());
        let stats = g.stats().unwrap();
        assert_eq!(stats.d_min, 3);
        assert!(stats.d_max > 40, "heavy tail expected, d_max = {}", stats.d_max);
        assert!(preferential_attachment(3, 3, 0).is_err());
    }
}
