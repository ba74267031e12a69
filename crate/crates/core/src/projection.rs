//! Degree-bounding graph projection.
//!
//! Three edge-addition strategies share one protocol engine: nodes take
//! turns as initiator, request edges from neighbors they are not yet
//! connected to, neighbors answer whether they still have capacity (through
//! randomized response in private mode), and the initiator establishes edges
//! with a ranked subset of the "Yes" responders. `EDGE-REMOVE` is the
//! deletion baseline.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::mech::{wrr_debias_count, wrr_respond, PrivacyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strategy {
    LpeaLow,
    LpeaHigh,
    RandomAdd,
    EdgeRemove,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::LpeaLow,
        Strategy::LpeaHigh,
        Strategy::RandomAdd,
        Strategy::EdgeRemove,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::LpeaLow => "lpea-low",
            Strategy::LpeaHigh => "lpea-high",
            Strategy::RandomAdd => "random-add",
            Strategy::EdgeRemove => "edge-remove",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.to_ascii_lowercase().replace('_', "-");
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == normalized)
            .ok_or_else(|| invalid(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConfig {
    pub theta: u32,
    pub strategy: Strategy,
    /// Randomized-response negotiation when set, truthful answers otherwise.
    pub private_mode: bool,
    pub params: PrivacyParams,
}

impl ProjectionConfig {
    fn validate(&self) -> Result<()> {
        if self.theta < 1 {
            return Err(invalid("theta must be at least 1"));
        }
        Ok(())
    }
}

/// Projected adjacency over the node set of the input graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedGraph {
    adjacency: Vec<Vec<u32>>,
}

impl ProjectedGraph {
    pub(crate) fn from_lists(mut adjacency: Vec<Vec<u32>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
        }
        ProjectedGraph { adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.adjacency.iter().map(|l| l.len() as u32).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, list)| {
            let a = a as u32;
            list.iter().copied().filter(move |&b| a < b).map(move |b| (a, b))
        })
    }
}

/// Runs `cfg.strategy`. `orders` is only read by the LPEA strategies.
pub fn project<R: Rng + ?Sized>(
    g: &Graph,
    orders: &[u32],
    cfg: &ProjectionConfig,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    match cfg.strategy {
        Strategy::LpeaLow => lpea_low(g, orders, cfg, rng),
        Strategy::LpeaHigh => lpea_high(g, orders, cfg, rng),
        Strategy::RandomAdd => random_add(g, cfg, rng),
        Strategy::EdgeRemove => edge_remove(g, cfg, rng),
    }
}

/// Low-degree-first edge addition. Initiators run in ascending
/// `(order, id)`; each picks its "Yes" responders with the smallest
/// `(order, id)`.
pub fn lpea_low<R: Rng + ?Sized>(
    g: &Graph,
    orders: &[u32],
    cfg: &ProjectionConfig,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    check_orders(g, orders)?;
    let mut schedule: Vec<u32> = (0..g.node_count() as u32).collect();
    schedule.sort_by_key(|&i| (orders[i as usize], i));
    edge_addition(g, cfg, &schedule, Ranking::Ascending(orders), rng)
}

/// High-degree-first variant: both sort keys descending.
pub fn lpea_high<R: Rng + ?Sized>(
    g: &Graph,
    orders: &[u32],
    cfg: &ProjectionConfig,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    check_orders(g, orders)?;
    let mut schedule: Vec<u32> = (0..g.node_count() as u32).collect();
    schedule.sort_by_key(|&i| std::cmp::Reverse((orders[i as usize], i)));
    edge_addition(g, cfg, &schedule, Ranking::Descending(orders), rng)
}

/// Random initiator permutation, uniform choice among "Yes" responders.
pub fn random_add<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &ProjectionConfig,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    let mut schedule: Vec<u32> = (0..g.node_count() as u32).collect();
    schedule.shuffle(rng);
    edge_addition(g, cfg, &schedule, Ranking::Random, rng)
}

/// Nodes in random order drop uniformly chosen incident edges until their
/// current degree is at most θ. Earlier deletions count for later nodes.
pub fn edge_remove<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &ProjectionConfig,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    cfg.validate()?;
    let theta = cfg.theta as usize;
    let mut adjacency: Vec<Vec<u32>> = (0..g.node_count() as u32)
        .map(|i| g.neighbors(i).to_vec())
        .collect();
    let mut schedule: Vec<u32> = (0..g.node_count() as u32).collect();
    schedule.shuffle(rng);
    for i in schedule {
        let current = &adjacency[i as usize];
        if current.len() <= theta {
            continue;
        }
        let doomed: Vec<u32> = current
            .choose_multiple(rng, current.len() - theta)
            .copied()
            .collect();
        for j in doomed {
            remove_sorted(&mut adjacency[i as usize], j);
            remove_sorted(&mut adjacency[j as usize], i);
        }
    }
    Ok(ProjectedGraph::from_lists(adjacency))
}

fn remove_sorted(list: &mut Vec<u32>, value: u32) {
    if let Ok(pos) = list.binary_search(&value) {
        list.remove(pos);
    }
}

fn check_orders(g: &Graph, orders: &[u32]) -> Result<()> {
    if orders.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: orders.len(),
            right: g.node_count(),
        });
    }
    Ok(())
}

enum Ranking<'a> {
    Ascending(&'a [u32]),
    Descending(&'a [u32]),
    Random,
}

fn edge_addition<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &ProjectionConfig,
    schedule: &[u32],
    ranking: Ranking<'_>,
    rng: &mut R,
) -> Result<ProjectedGraph> {
    cfg.validate()?;
    let theta = cfg.theta as usize;
    // d_max is public, so no negotiation happens when no bound can bind
    if g.degree_sequence().into_iter().all(|d| d as usize <= theta) {
        return Ok(ProjectedGraph::from_lists(
            (0..g.node_count() as u32).map(|i| g.neighbors(i).to_vec()).collect(),
        ));
    }
    let budget = cfg.params.negotiation_budget();
    let mut projected: Vec<Vec<u32>> = vec![Vec::new(); g.node_count()];

    for &i in schedule {
        let own = &projected[i as usize];
        if own.len() >= theta {
            continue;
        }
        let requested: Vec<u32> = g
            .neighbors(i)
            .iter()
            .copied()
            .filter(|j| !own.contains(j))
            .collect();
        if requested.is_empty() {
            continue;
        }

        let mut accepted = Vec::with_capacity(requested.len());
        for &j in &requested {
            let has_room = projected[j as usize].len() < theta;
            let says_yes = if cfg.private_mode {
                wrr_respond(rng, has_room, budget)?
            } else {
                has_room
            };
            if says_yes {
                accepted.push(j);
            }
        }

        let estimate = if cfg.private_mode {
            let raw = wrr_debias_count(requested.len(), accepted.len(), budget)?;
            raw.round().clamp(0.0, accepted.len() as f64) as usize
        } else {
            accepted.len()
        };
        let take = estimate.min(theta - projected[i as usize].len());
        if take == 0 {
            continue;
        }

        let chosen: Vec<u32> = match ranking {
            Ranking::Ascending(orders) => {
                accepted.sort_by_key(|&j| (orders[j as usize], j));
                accepted.truncate(take);
                accepted
            }
            Ranking::Descending(orders) => {
                accepted.sort_by_key(|&j| std::cmp::Reverse((orders[j as usize], j)));
                accepted.truncate(take);
                accepted
            }
            Ranking::Random => accepted.choose_multiple(rng, take).copied().collect(),
        };

        for j in chosen {
            // a flipped "Yes" from a full neighbor must not break the bound
            if projected[i as usize].len() < theta && projected[j as usize].len() < theta {
                projected[i as usize].push(j);
                projected[j as usize].push(i);
            }
        }
    }
    Ok(ProjectedGraph::from_lists(projected))
}

/// Per-node absolute degree loss `|d_i - d̄_i|` and its total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionError {
    pub per_node: Vec<u32>,
    pub total: u64,
}

pub fn projection_error(g: &Graph, pg: &ProjectedGraph) -> Result<ProjectionError> {
    if g.node_count() != pg.node_count() {
        return Err(Error::LengthMismatch {
            left: g.node_count(),
            right: pg.node_count(),
        });
    }
    let per_node: Vec<u32> = g
        .degree_sequence()
        .into_iter()
        .zip(pg.degrees())
        .map(|(d, p)| d.abs_diff(p))
        .collect();
    let total = per_node.iter().map(|&x| x as u64).sum();
    Ok(ProjectionError { per_node, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list_str;
    use crate::seed::ProtocolRng;
    use rand::SeedableRng;

    fn cfg(theta: u32, strategy: Strategy, private_mode: bool) -> ProjectionConfig {
        ProjectionConfig {
            theta,
            strategy,
            private_mode,
            params: PrivacyParams::new(3.0, 0.1).unwrap(),
        }
    }

    fn paw() -> Graph {
        load_edge_list_str("A B\nB C\nB D\nA C\n").unwrap()
    }

    fn labelled_edges(g: &Graph, pg: &ProjectedGraph) -> Vec<String> {
        let mut out: Vec<String> = pg
            .edges()
            .map(|(a, b)| {
                let mut pair = [g.label(a), g.label(b)];
                pair.sort();
                pair.concat()
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn paw_lpea_low() {
        let g = paw();
        let degrees = g.degree_sequence();
        let mut rng = ProtocolRng::seed_from_u64(0);
        let pg = lpea_low(&g, &degrees, &cfg(1, Strategy::LpeaLow, false), &mut rng).unwrap();
        assert_eq!(labelled_edges(&g, &pg), vec!["AC", "BD"]);
    }

    #[test]
    fn paw_lpea_high_keeps_no_more_than_low() {
        let g = paw();
        let degrees = g.degree_sequence();
        let mut rng = ProtocolRng::seed_from_u64(0);
        let pg = lpea_high(&g, &degrees, &cfg(1, Strategy::LpeaHigh, false), &mut rng).unwrap();
        // B initiates and takes its highest (degree, id) responder, C
        assert_eq!(labelled_edges(&g, &pg), vec!["BC"]);
    }

    #[test]
    fn paw_random_add_with_b_picking_c() {
        let g = paw();
        let c = cfg(1, Strategy::RandomAdd, false);
        let found = (0..500u64).any(|seed| {
            let pg = random_add(&g, &c, &mut ProtocolRng::seed_from_u64(seed)).unwrap();
            labelled_edges(&g, &pg) == vec!["BC"]
        });
        assert!(found);
    }

    #[test]
    fn star_center_keeps_theta_edges() {
        let g = Graph::from_edges(6, (1..6).map(|leaf| (0, leaf))).unwrap();
        let degrees = g.degree_sequence();
        let mut rng = ProtocolRng::seed_from_u64(0);
        let pg = lpea_low(&g, &degrees, &cfg(2, Strategy::LpeaLow, false), &mut rng).unwrap();
        let d = pg.degrees();
        assert_eq!(d[0], 2);
        assert!(d[1..].iter().all(|&x| x <= 1));
        assert_eq!(pg.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn large_theta_is_identity() {
        let g = paw();
        let degrees = g.degree_sequence();
        for strategy in Strategy::ALL {
            for private_mode in [false, true] {
                let mut rng = ProtocolRng::seed_from_u64(4);
                let pg = project(&g, &degrees, &cfg(3, strategy, private_mode), &mut rng).unwrap();
                assert_eq!(pg.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn edge_remove_forced_count_on_claw() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        for seed in 0..20 {
            let mut rng = ProtocolRng::seed_from_u64(seed);
            let pg = edge_remove(&g, &cfg(1, Strategy::EdgeRemove, false), &mut rng).unwrap();
            assert_eq!(pg.edge_count(), 1);
            assert_eq!(pg.degrees()[0], 1);
        }
    }

    #[test]
    fn projection_error_examples() {
        let g = paw();
        let degrees = g.degree_sequence();
        let mut rng = ProtocolRng::seed_from_u64(0);
        let identity = lpea_low(&g, &degrees, &cfg(5, Strategy::LpeaLow, false), &mut rng).unwrap();
        assert_eq!(projection_error(&g, &identity).unwrap().total, 0);

        let low = lpea_low(&g, &degrees, &cfg(1, Strategy::LpeaLow, false), &mut rng).unwrap();
        let err = projection_error(&g, &low).unwrap();
        assert_eq!(err.per_node, vec![1, 2, 1, 0]);
        assert_eq!(err.total, 4);

        // only edge AB left: degrees [1, 1, 0, 0]
        let only_ab = ProjectedGraph::from_lists(vec![vec![1], vec![0], vec![], vec![]]);
        assert_eq!(projection_error(&g, &only_ab).unwrap().total, 6);
    }

    #[test]
    fn bad_inputs() {
        let g = paw();
        let mut rng = ProtocolRng::seed_from_u64(0);
        assert!(lpea_low(&g, &[1, 2], &cfg(1, Strategy::LpeaLow, false), &mut rng).is_err());
        assert!(random_add(&g, &cfg(0, Strategy::RandomAdd, false), &mut rng).is_err());
        assert_eq!("LPEA_LOW".parse::<Strategy>().unwrap(), Strategy::LpeaLow);
        assert!("nope".parse::<Strategy>().is_err());
    }
}
