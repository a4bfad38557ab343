//! Hill estimator of the tail exponent with a bootstrap interval.

use crate::error::StableError;
use crate::rng::aux_stream;
use rand::Rng;

/// Fraction of the largest order statistics used by the estimator.
pub const HILL_FRACTION: f64 = 0.01;
pub const BOOTSTRAP_ROUNDS: usize = 200;
const MIN_SAMPLES: usize = 10_000;
/// Estimated tail indices above this are reported as not heavy-tailed.
const LIGHT_TAIL_INDEX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// Density exponent `dim + alpha`: the density decays like `|v|^{-exponent}`.
    pub exponent: f64,
    /// Hill index `alpha` of the radial survival function `P(|V| > r) ~ r^{-alpha}`.
    pub alpha: f64,
    /// 95% percentile bootstrap interval for `exponent`.
    pub ci: (f64, f64),
    pub k: usize,
    /// False when the fitted index is so large that no power tail is visible.
    pub heavy_tailed: bool,
}

fn hill(log_excess: &[f64]) -> f64 {
    log_excess.len() as f64 / log_excess.iter().sum::<f64>()
}

/// Fits the tail of the magnitudes `r_j = |V_j|` of `dim`-dimensional samples.
pub fn tail_exponent(magnitudes: &[f64], dim: usize, seed: u64) -> Result<TailEstimate, StableError> {
    if magnitudes.len() < MIN_SAMPLES {
        return Err(StableError::TooFewSamples { needed: MIN_SAMPLES, got: magnitudes.len() });
    }
    let mut r: Vec<f64> = magnitudes.iter().map(|x| x.abs()).collect();
    r.sort_by(|a, b| b.total_cmp(a));
    let k = ((HILL_FRACTION * r.len() as f64) as usize).max(2);
    let threshold = r[k];
    if !(threshold > 0.0) {
        return Err(StableError::InvalidParams("tail threshold is zero".into()));
    }
    let logs: Vec<f64> = r[..k].iter().map(|x| (x / threshold).ln()).collect();
    let alpha = hill(&logs);
    let mut rng = aux_stream(seed, 0x7a11);
    let mut boot: Vec<f64> = (0..BOOTSTRAP_ROUNDS)
        .map(|_| {
            let sum: f64 = (0..k).map(|_| logs[rng.random_range(0..k)]).sum();
            dim as f64 + k as f64 / sum
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let lo = boot[(0.025 * BOOTSTRAP_ROUNDS as f64) as usize];
    let hi = boot[((0.975 * BOOTSTRAP_ROUNDS as f64) as usize).min(BOOTSTRAP_ROUNDS - 1)];
    Ok(TailEstimate {
        exponent: dim as f64 + alpha,
        alpha,
        ci: (lo, hi),
        k,
        heavy_tailed: alpha <= LIGHT_TAIL_INDEX,
    })
}
