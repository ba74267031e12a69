//! Selection of the projection threshold θ from masked sums.
//!
//! Two collector-driven protocols:
//!
//! * by sum: for every candidate `k` in `1..=K` each node projects at `k`
//!   and submits its masked degree loss; the collector picks the `k`
//!   minimizing `n·k/ε + Σ loss`.
//! * by deviation: binary search for the point where the number of nodes
//!   with degree above θ crosses `n/ε`, one masked indicator sum per probe.
//!
//! Masking can be bypassed; both protocols must then return the same θ.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::mech::PrivacyParams;
use crate::projection::{lpea_low, projection_error, ProjectionConfig, Strategy};
use crate::secagg::{ka_param, AggregationSession, MaskTopology, DEFAULT_LAMBDA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    BySum,
    ByDeviation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSearchConfig {
    /// Largest candidate threshold.
    pub k_max: u32,
    pub epsilon: f64,
    pub alpha: f64,
    pub lambda: u32,
    pub method: ThetaMethod,
    pub masking: bool,
    pub topology: MaskTopology,
}

impl ThetaSearchConfig {
    pub fn new(k_max: u32, epsilon: f64, method: ThetaMethod) -> Self {
        ThetaSearchConfig {
            k_max,
            epsilon,
            alpha: 0.1,
            lambda: DEFAULT_LAMBDA,
            method,
            masking: true,
            topology: MaskTopology::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(invalid("candidate domain K must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Chosen θ plus the number of aggregation rounds spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaSelection {
    pub theta: u32,
    pub rounds: u32,
}

/// Per-round summation channel: either a secure-aggregation session or the
/// plaintext bypass.
struct Collector {
    session: Option<AggregationSession>,
}

impl Collector {
    fn new<R: Rng + ?Sized>(party_count: usize, cfg: &ThetaSearchConfig, rng: &mut R) -> Result<Self> {
        let session = if cfg.masking {
            let params = ka_param(cfg.lambda)?;
            Some(AggregationSession::setup(party_count, params, cfg.topology, rng)?)
        } else {
            None
        };
        Ok(Collector { session })
    }

    fn sum(&self, round: u64, values: &[u64]) -> Result<u64> {
        match &self.session {
            Some(session) => session.sum_round(round, values),
            None => Ok(values.iter().sum()),
        }
    }
}

/// Total error estimate `n·k/ε + Σ_i |d_i − d̄_i|` for threshold `k`.
pub fn sum_objective(node_count: usize, k: u32, epsilon: f64, total_loss: u64) -> f64 {
    node_count as f64 * k as f64 / epsilon + total_loss as f64
}

/// Exhaustive search over `1..=K`. Projections inside the search use
/// truthful negotiation; only the per-node losses are protected, by masking.
pub fn theta_by_sum<R: Rng + ?Sized>(
    g: &Graph,
    orders: &[u32],
    cfg: &ThetaSearchConfig,
    rng: &mut R,
) -> Result<ThetaSelection> {
    cfg.validate()?;
    let n = g.node_count();
    let collector = Collector::new(n, cfg, rng)?;
    let params = PrivacyParams::new(cfg.epsilon, cfg.alpha)?;
    let mut best: Option<(f64, u32)> = None;
    for k in 1..=cfg.k_max {
        let projection = ProjectionConfig {
            theta: k,
            strategy: Strategy::LpeaLow,
            private_mode: false,
            params,
        };
        let projected = lpea_low(g, orders, &projection, rng)?;
        let losses: Vec<u64> = projection_error(g, &projected)?
            .per_node
            .into_iter()
            .map(u64::from)
            .collect();
        let total = collector.sum(k as u64, &losses)?;
        let objective = sum_objective(n, k, cfg.epsilon, total);
        // strict comparison keeps the smallest k on ties
        if best.is_none_or(|(value, _)| objective < value) {
            best = Some((objective, k));
        }
    }
    Ok(ThetaSelection {
        theta: best.map(|(_, k)| k).unwrap_or(1),
        rounds: cfg.k_max,
    })
}

/// `count · ε < n`, the exact form of `count < n/ε`.
fn below_threshold(count: u64, node_count: usize, epsilon: f64) -> bool {
    (count as f64) * epsilon < node_count as f64
}

/// Binary search for the (1 − 1/ε) quantile of the degree sequence.
///
/// Probes `⌊(θ_L + θ_R)/2⌋` and moves `θ_R` below or `θ_L` above it until the
/// window is empty, so the result is exactly the smallest θ passing the
/// test. Only `1..K` is searched; `K` is the fallback.
pub fn theta_by_deviation<R: Rng + ?Sized>(
    degrees: &[u32],
    cfg: &ThetaSearchConfig,
    rng: &mut R,
) -> Result<ThetaSelection> {
    cfg.validate()?;
    let n = degrees.len();
    let collector = Collector::new(n, cfg, rng)?;
    let (mut low, mut high) = (1i64, cfg.k_max as i64 - 1);
    let mut rounds = 0u32;
    while low <= high {
        let probe = (low + high).div_euclid(2);
        let indicators: Vec<u64> = degrees.iter().map(|&d| u64::from(d as i64 > probe)).collect();
        let count = collector.sum(rounds as u64, &indicators)?;
        rounds += 1;
        if below_threshold(count, n, cfg.epsilon) {
            high = probe - 1;
        } else {
            low = probe + 1;
        }
    }
    Ok(ThetaSelection {
        theta: low.clamp(1, cfg.k_max as i64) as u32,
        rounds,
    })
}

/// Smallest θ in `1..=K` with `|{i : d_i > θ}| < n/ε`, or `K` if none.
pub fn quantile_oracle(degrees: &[u32], epsilon: f64, k_max: u32) -> u32 {
    let n = degrees.len();
    (1..=k_max)
        .find(|&theta| {
            let count = degrees.iter().filter(|&&d| d > theta).count() as u64;
            below_threshold(count, n, epsilon)
        })
        .unwrap_or(k_max)
}
