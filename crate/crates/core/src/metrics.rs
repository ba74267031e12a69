//! Utility metrics between an original and a released degree sequence.

use crate::error::{invalid, Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(invalid("metrics need at least one value"));
    }
    Ok(())
}

/// Mean absolute error `(1/n) Σ |s_i − t_i|`.
pub fn mae(original: &[f64], released: &[f64]) -> Result<f64> {
    check_lengths(original.len(), released.len())?;
    let total: f64 = original.iter().zip(released).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / original.len() as f64)
}

/// Mean squared error `(1/n) Σ (s_i − t_i)²`.
pub fn mse(original: &[f64], released: &[f64]) -> Result<f64> {
    check_lengths(original.len(), released.len())?;
    let total: f64 = original.iter().zip(released).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(total / original.len() as f64)
}

/// Mean absolute error between two degree distributions: their L1 distance
/// divided by the vector length.
pub fn distribution_distance(original: &[f64], released: &[f64]) -> Result<f64> {
    mae(original, released)
}
