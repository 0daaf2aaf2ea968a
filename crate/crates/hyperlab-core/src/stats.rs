//! Tail-probability estimates and Wilson confidence intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 99% standard-normal quantile Φ⁻¹(0.995), used for every Wilson
/// interval in the crate.
pub const WILSON_Z_99: f64 = 2.575_829_303_548_900_4;

/// How a tail probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    ExactEnumeration,
    MonteCarlo,
}

/// Probability estimate for a threshold event (tail, interval, or window),
/// with a two-sided 99% Wilson interval; `threshold` records the cut the
/// event was evaluated at.
///
/// Invariants: `ci_low ≤ p_hat ≤ ci_high`; exact enumeration collapses the
/// interval onto the point estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub threshold: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
    pub mode: EstimateMode,
}

impl TailEstimate {
    /// Estimate from a Monte-Carlo success count.
    pub fn from_counts(threshold: f64, successes: u64, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        if successes > trials {
            return Err(Error::InvalidArgument(format!(
                "successes {successes} exceed trials {trials}"
            )));
        }
        let p_hat = successes as f64 / trials as f64;
        let (ci_low, ci_high) = wilson99(successes, trials);
        Ok(TailEstimate {
            threshold,
            p_hat,
            ci_low: ci_low.min(p_hat),
            ci_high: ci_high.max(p_hat),
            trials,
            seed,
            mode: EstimateMode::MonteCarlo,
        })
    }

    /// Exact probability from full enumeration; the interval is the point.
    pub fn exact(threshold: f64, probability: f64, patterns: u64, seed: u64) -> Self {
        TailEstimate {
            threshold,
            p_hat: probability,
            ci_low: probability,
            ci_high: probability,
            trials: patterns,
            seed,
            mode: EstimateMode::ExactEnumeration,
        }
    }
}

/// Two-sided 99% Wilson score interval for a binomial proportion.
pub fn wilson99(successes: u64, trials: u64) -> (f64, f64) {
    wilson(successes, trials, WILSON_Z_99)
}

fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
