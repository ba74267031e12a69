//! Undirected simple graphs loaded from SNAP-style edge lists.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Immutable undirected simple graph with contiguous internal ids.
///
/// Neighbor lists are sorted by internal id; every tie-break downstream
/// relies on that ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    labels: Vec<String>,
    edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub d_min: u32,
    pub d_max: u32,
    pub d_avg: f64,
}

impl Graph {
    /// Builds a graph on nodes `0..node_count` from an edge iterator.
    /// Self-loops and duplicates are dropped. Labels are the decimal ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a as usize >= node_count || b as usize >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) references a node outside 0..{node_count}"
                )));
            }
            if a != b {
                adjacency[a as usize].push(b);
                adjacency[b as usize].push(a);
            }
        }
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Ok(Self::from_adjacency(adjacency, labels))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<u32>>, labels: Vec<String>) -> Self {
        let mut twice_edges = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice_edges += list.len();
        }
        Graph {
            adjacency,
            labels,
            edge_count: twice_edges / 2,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: u32) -> u32 {
        self.adjacency[node as usize].len() as u32
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    /// External label of an internal node id.
    pub fn label(&self, node: u32) -> &str {
        &self.labels[node as usize]
    }

    /// Id of an external label, if present.
    pub fn node_id(&self, label: &str) -> Option<u32> {
        self.labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, list)| {
            let a = a as u32;
            list.iter().copied().filter(move |&b| a < b).map(move |b| (a, b))
        })
    }

    pub fn degree_sequence(&self) -> Vec<u32> {
        self.adjacency.iter().map(|l| l.len() as u32).collect()
    }

    pub fn stats(&self) -> Result<GraphStats> {
        let degrees = self.degree_sequence();
        let (Some(&d_min), Some(&d_max)) = (degrees.iter().min(), degrees.iter().max()) else {
            return Err(Error::EmptyGraph);
        };
        Ok(GraphStats {
            nodes: self.node_count(),
            edges: self.edge_count,
            d_min,
            d_max,
            d_avg: 2.0 * self.edge_count as f64 / self.node_count() as f64,
        })
    }

    /// Writes the graph as an edge list that reloads to the identical
    /// internal structure (same ids, same adjacency).
    ///
    /// Nodes are introduced in id order: node `k` is emitted together with a
    /// smaller neighbor when it has one, otherwise paired with `k + 1`, and
    /// as a self-loop line when neither exists.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.node_count();
        let mut introduced = vec![false; n];
        let mut written = std::collections::HashSet::new();
        for k in 0..n {
            if introduced[k] {
                continue;
            }
            let k32 = k as u32;
            let edge = match self.adjacency[k].first() {
                Some(&j) if j < k32 => (j, k32),
                _ if k + 1 < n && self.has_edge(k32, k32 + 1) => (k32, k32 + 1),
                // a self-loop line introduces the label without an edge
                _ => (k32, k32),
            };
            writeln!(out, "{} {}", self.label(edge.0), self.label(edge.1))?;
            introduced[edge.0 as usize] = true;
            introduced[edge.1 as usize] = true;
            written.insert((edge.0.min(edge.1), edge.0.max(edge.1)));
        }
        for (a, b) in self.edges() {
            if !written.contains(&(a, b)) {
                writeln!(out, "{} {}", self.label(a), self.label(b))?;
            }
        }
        Ok(())
    }
}

/// Parses a SNAP edge list. `#` lines and blank lines are skipped, edges are
/// symmetrized and deduplicated, self-loops dropped, and labels numbered in
/// order of first appearance.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut adjacency: Vec<Vec<u32>> = Vec::new();

    let mut intern = |label: &str, adjacency: &mut Vec<Vec<u32>>| -> u32 {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len() as u32;
        ids.insert(label.to_owned(), id);
        labels.push(label.to_owned());
        adjacency.push(Vec::new());
        id
    };

    for (index, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: index + 1,
                found: tokens.len(),
            });
        }
        let a = intern(tokens[0], &mut adjacency);
        let b = intern(tokens[1], &mut adjacency);
        if a != b {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
    }
    // a self-loop on a fresh label still introduces the node ("5 5" -> n = 1)
    Ok(Graph::from_adjacency(adjacency, labels))
}

pub fn load_edge_list_str(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paw() -> Graph {
        load_edge_list_str("A B\nB C\nB D\nA C\n").unwrap()
    }

    #[test]
    fn symmetrizes_and_dedupes() {
        let g = load_edge_list_str("1 2\n2 1\n2 3\n# c\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.degree_sequence(), vec![1, 2, 1]);
    }

    #[test]
    fn self_loop_only() {
        let g = load_edge_list_str("5 5\n").unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = load_edge_list_str("# header\n1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, found: 1 }));
        let err = load_edge_list_str("1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, found: 3 }));
    }

    #[test]
    fn paw_degrees() {
        let g = paw();
        assert_eq!(g.node_id("B"), Some(1));
        assert_eq!(g.degree_sequence(), vec![2, 3, 2, 1]);
    }

    #[test]
    fn isolated_nodes_via_constructor() {
        let g = Graph::from_edges(4, []).unwrap();
        assert_eq!(g.degree_sequence(), vec![0, 0, 0, 0]);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree_sequence(), vec![1, 2, 1]);
    }

    #[test]
    fn stats_triangle_and_empty() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = g.stats().unwrap();
        assert_eq!((s.nodes, s.edges, s.d_min, s.d_max), (3, 3, 2, 2));
        assert_eq!(s.d_avg, 2.0);
        assert!(matches!(
            load_edge_list_str("# nothing\n").unwrap().stats(),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn dump_preserves_ids_when_first_appearance_is_out_of_order() {
        let g = load_edge_list_str("0 1\n2 3\n0 3\n").unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let reloaded = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, reloaded);
    }
}
