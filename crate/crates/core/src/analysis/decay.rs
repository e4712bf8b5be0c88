//! Empirical decay rate of `alpha + beta` along an orbit.
//!
//! The fit is descriptive: it reports a power-law exponent together with its
//! residual and how much the exponent drifts between sub-windows, and makes
//! no pass/fail judgement on the value.

use serde::Serialize;

use crate::analysis::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_POINTS: usize = 100;

/// Relative exponent drift between the two tail quarters above which the
/// data is flagged as not following a power law.
pub const POWER_LAW_DRIFT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `p` in `value ~ C m^(-p)`.
    pub exponent: f64,
    /// `ln C`.
    pub log_prefactor: f64,
    /// Root-mean-square residual of the log-log fit.
    pub rms_residual: f64,
    /// Exponents fitted on the third and on the last quarter.
    pub quarter_exponents: (f64, f64),
    pub drift: f64,
    pub power_law: bool,
    pub points_used: usize,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fits `values[k] ~ C m^(-p)` with `m = k + 1` over the last half of the
/// sequence. Every value must be positive.
pub fn fit_power_law(values: &[f64]) -> Result<DecayFit> {
    let usable = values
        .iter()
        .take_while(|v| **v > 0.0 && v.is_finite())
        .count();
    if usable < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: usable,
        });
    }
    let points: Vec<(f64, f64)> = values[..usable]
        .iter()
        .enumerate()
        .map(|(k, v)| (((k + 1) as f64).ln(), v.ln()))
        .collect();
    let tail = &points[usable / 2..];
    let (slope, intercept, rms) = least_squares(tail);
    let quarter = tail.len() / 2;
    let (s3, _, _) = least_squares(&tail[..quarter]);
    let (s4, _, _) = least_squares(&tail[quarter..]);
    let exponent = -slope;
    let drift = (s3 - s4).abs() / exponent.abs().max(f64::MIN_POSITIVE);
    Ok(DecayFit {
        exponent,
        log_prefactor: intercept,
        rms_residual: rms,
        quarter_exponents: (-s3, -s4),
        drift,
        power_law: drift < POWER_LAW_DRIFT,
        points_used: tail.len(),
    })
}

/// Fits the decay of `alpha + beta` along the reduced orbit, indexed from `m = 1`.
pub fn estimate_decay_exponent<T: Scalar>(traj: &Trajectory<T>) -> Result<DecayFit> {
    let sums: Vec<f64> = traj
        .reduced
        .iter()
        .skip(1)
        .map(|r| r.sum().as_f64())
        .collect();
    fit_power_law(&sums)
}
