//! Degree sequence release: Laplace noise on projected degrees and the
//! binned degree distribution.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::mech::{laplace_sample, PrivacyParams};
use crate::projection::ProjectedGraph;
use crate::seed::{party_rng, Phase};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReleaseReport {
    /// Noisy degrees, unrounded.
    pub noisy_degrees: Vec<f64>,
    /// Proportion of nodes per integer degree `0..n`.
    pub distribution: Vec<f64>,
    pub theta: u32,
    pub params: PrivacyParams,
    pub seed: u64,
}

/// Laplace scale for the release: θ / ((1 − α)ε).
pub fn noise_scale(theta: u32, params: &PrivacyParams) -> f64 {
    theta as f64 / params.release_budget()
}

/// Each node perturbs its projected degree with its own noise stream,
/// derived from `seed`.
pub fn dsr(pg: &ProjectedGraph, theta: u32, params: &PrivacyParams, seed: u64) -> Result<ReleaseReport> {
    if theta < 1 {
        return Err(invalid("theta must be at least 1"));
    }
    let scale = noise_scale(theta, params);
    let noise = (0..pg.node_count())
        .map(|i| laplace_sample(&mut party_rng(seed, Phase::Release, i), scale))
        .collect::<Result<Vec<f64>>>()?;
    Ok(assemble_report(&pg.degrees(), &noise, theta, *params, seed))
}

/// Builds a report from projected degrees and already drawn noise.
pub fn assemble_report(
    projected: &[u32],
    noise: &[f64],
    theta: u32,
    params: PrivacyParams,
    seed: u64,
) -> ReleaseReport {
    let noisy_degrees: Vec<f64> = projected
        .iter()
        .zip(noise)
        .map(|(&d, &z)| d as f64 + z)
        .collect();
    let distribution = degree_distribution(&noisy_degrees, projected.len());
    ReleaseReport {
        noisy_degrees,
        distribution,
        theta,
        params,
        seed,
    }
}

/// Rounds each degree to the nearest integer, clamps to `[0, n − 1]` and
/// returns the normalized histogram of length `n`.
pub fn degree_distribution(degrees: &[f64], n: usize) -> Vec<f64> {
    let mut histogram = vec![0.0; n.max(1)];
    let top = (n.max(1) - 1) as f64;
    for &d in degrees {
        let bin = d.round().clamp(0.0, top) as usize;
        histogram[bin] += 1.0;
    }
    let total = degrees.len().max(1) as f64;
    histogram.iter_mut().for_each(|h| *h /= total);
    histogram
}
