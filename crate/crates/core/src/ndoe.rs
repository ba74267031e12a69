//! Neighbor's degree order encoding: each node privately samples the index
//! of a coarse degree partition and shares it with its neighbors as a
//! sortable stand-in for its degree.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::mech::{categorical_sample, exp_mech_probs};

/// Public partition of the degree domain `[d_min, d_max]`.
///
/// Intervals are half-open `[lo, lo + p_size)` except the last, which is
/// closed at `d_max`. Orders are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionScheme {
    pub d_min: u32,
    pub d_max: u32,
    pub p_size: u32,
    pub p_num: u32,
    /// `(lo, hi)` per partition; `hi` is exclusive except for the last one.
    pub intervals: Vec<(u32, u32)>,
    pub medians: Vec<f64>,
    /// Score sensitivity `d_max - d_min`.
    pub sensitivity: u32,
}

pub fn build_partitions(d_min: u32, d_max: u32, p_size: u32) -> Result<PartitionScheme> {
    if p_size < 1 {
        return Err(invalid("partition size must be at least 1"));
    }
    if d_min > d_max {
        return Err(invalid(format!("d_min {d_min} exceeds d_max {d_max}")));
    }
    let span = d_max - d_min;
    let p_num = span.div_ceil(p_size).max(1);
    let intervals: Vec<(u32, u32)> = (0..p_num)
        .map(|j| {
            let lo = d_min + j * p_size;
            let hi = if j + 1 == p_num { d_max } else { lo + p_size };
            (lo, hi)
        })
        .collect();
    let medians = intervals
        .iter()
        .map(|&(lo, hi)| (lo as f64 + hi as f64) / 2.0)
        .collect();
    Ok(PartitionScheme {
        d_min,
        d_max,
        p_size,
        p_num,
        intervals,
        medians,
        sensitivity: span,
    })
}

impl PartitionScheme {
    /// 1-based index of the partition containing `degree`.
    pub fn partition_of(&self, degree: u32) -> Option<u32> {
        if degree < self.d_min || degree > self.d_max {
            return None;
        }
        Some(((degree - self.d_min) / self.p_size).min(self.p_num - 1) + 1)
    }

    fn check_domain(&self, degree: u32) -> Result<()> {
        if degree < self.d_min || degree > self.d_max {
            return Err(Error::DegreeOutOfDomain {
                degree,
                lo: self.d_min,
                hi: self.d_max,
            });
        }
        Ok(())
    }
}

/// Sampling distribution over orders `1..=p_num` for a node of degree
/// `degree`: exponential mechanism with scores `-|degree - median|`.
pub fn ndoe_probabilities(degree: u32, budget: f64, scheme: &PartitionScheme) -> Result<Vec<f64>> {
    scheme.check_domain(degree)?;
    if scheme.sensitivity == 0 {
        return Ok(vec![1.0]);
    }
    let scores: Vec<f64> = scheme
        .medians
        .iter()
        .map(|m| -(degree as f64 - m).abs())
        .collect();
    exp_mech_probs(&scores, budget, scheme.sensitivity as f64)
}

/// Samples the order of a node with `degree` under budget `budget` (the
/// caller passes αε/2).
pub fn ndoe_sample<R: Rng + ?Sized>(
    rng: &mut R,
    degree: u32,
    budget: f64,
    scheme: &PartitionScheme,
) -> Result<u32> {
    let probs = ndoe_probabilities(degree, budget, scheme)?;
    if probs.len() == 1 {
        return Ok(1);
    }
    Ok(categorical_sample(rng, &probs)? as u32 + 1)
}
