//! Randomization primitives: Laplace noise, Warner randomized response, the
//! exponential mechanism and a categorical sampler.
//!
//! Every function takes its budget already allocated; none of them know
//! about the α split.

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Total budget ε and the allocation fraction α.
///
/// NDOE and the randomized-response negotiation each get αε/2, the Laplace
/// release gets (1−α)ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    epsilon: f64,
    alpha: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(PrivacyParams { epsilon, alpha })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ndoe_budget(&self) -> f64 {
        self.alpha * self.epsilon / 2.0
    }

    pub fn negotiation_budget(&self) -> f64 {
        self.alpha * self.epsilon / 2.0
    }

    pub fn release_budget(&self) -> f64 {
        (1.0 - self.alpha) * self.epsilon
    }
}

fn check_budget(budget: f64) -> Result<()> {
    if budget.is_finite() && budget > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("budget must be positive, got {budget}")))
    }
}

/// Draws from Lap(scale) by inverting the CDF on one open-interval uniform.
pub fn laplace_sample<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(invalid(format!("laplace scale must be positive, got {scale}")));
    }
    let u: f64 = rng.sample(Open01);
    let centered = u - 0.5;
    Ok(-scale * centered.signum() * (1.0 - 2.0 * centered.abs()).ln())
}

/// Density of Lap(scale) at `x`.
pub fn laplace_density(x: f64, scale: f64) -> f64 {
    (-x.abs() / scale).exp() / (2.0 * scale)
}

/// Probability of answering truthfully under WRR, e^ε/(e^ε + 1).
pub fn wrr_truth_probability(budget: f64) -> f64 {
    1.0 / (1.0 + (-budget).exp())
}

pub fn wrr_respond<R: Rng + ?Sized>(rng: &mut R, truth: bool, budget: f64) -> Result<bool> {
    check_budget(budget)?;
    let keep = rng.gen::<f64>() < wrr_truth_probability(budget);
    Ok(if keep { truth } else { !truth })
}

/// Debiased count of true "Yes" answers among `asked` WRR responses of
/// which `yes` came back "Yes". Unclamped; may leave `[0, asked]`.
pub fn wrr_debias_count(asked: usize, yes: usize, budget: f64) -> Result<f64> {
    check_budget(budget)?;
    if yes > asked {
        return Err(invalid(format!("{yes} yes answers out of {asked} requests")));
    }
    let e = budget.exp();
    Ok((yes as f64 * (e + 1.0) - asked as f64) / (e - 1.0))
}

/// Exponential-mechanism selection probabilities for `scores` under budget
/// `budget` and score sensitivity `sensitivity`.
pub fn exp_mech_probs(scores: &[f64], budget: f64, sensitivity: f64) -> Result<Vec<f64>> {
    if !(sensitivity.is_finite() && sensitivity > 0.0) {
        return Err(invalid(format!("sensitivity must be positive, got {sensitivity}")));
    }
    check_budget(budget)?;
    if scores.is_empty() {
        return Err(invalid("exponential mechanism needs at least one score"));
    }
    let factor = budget / (2.0 * sensitivity);
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scores.iter().map(|s| ((s - top) * factor).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Inverse-CDF draw of an index from `probs`.
pub fn categorical_sample<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> Result<usize> {
    if probs.is_empty() {
        return Err(Error::InvalidProbabilities("empty vector".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!("entry {p} is not a probability")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities(format!("sums to {total}")));
    }
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (index, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return Ok(index);
        }
    }
    // rounding left u above the last partial sum
    Ok(probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1))
}
