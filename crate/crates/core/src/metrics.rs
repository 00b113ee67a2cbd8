//! Throughput and coverage metrics plus simple Monte-Carlo statistics.

use rand::Rng;
use serde::Serialize;

use crate::seed;

/// Normalized α-fair throughput (power mean of order `1 − α`) over the
/// users with a positive rate. `None` when nobody is served.
pub fn alpha_fair_throughput(rates: &[f64], alpha: f64) -> Option<f64> {
    let served: Vec<f64> = rates.iter().copied().filter(|&r| r > 0.0).collect();
    if served.is_empty() {
        return None;
    }
    let n = served.len() as f64;
    if alpha == 1.0 {
        let mean_ln = served.iter().map(|r| r.ln()).sum::<f64>() / n;
        return Some(mean_ln.exp());
    }
    let e = 1.0 - alpha;
    // Scale by the largest rate to keep the powers in range.
    let top = served.iter().copied().fold(0.0, f64::max);
    let m = served.iter().map(|r| (r / top).powf(e)).sum::<f64>() / n;
    Some(top * m.powf(1.0 / e))
}

/// Fraction of users whose SINR (linear) reaches `threshold_db`.
pub fn sinr_coverage(sinr: &[f64], threshold_db: f64) -> f64 {
    if sinr.is_empty() {
        return 0.0;
    }
    let t = crate::channel::db_to_linear(threshold_db);
    sinr.iter().filter(|&&g| g >= t).count() as f64 / sinr.len() as f64
}

/// Fraction of users whose scheduled rate reaches `r_min`.
pub fn rate_coverage(rates: &[f64], r_min: f64) -> f64 {
    if rates.is_empty() {
        return 0.0;
    }
    rates.iter().filter(|&&r| r >= r_min).count() as f64 / rates.len() as f64
}

/// Metrics of one realization (or one drop averaged over fading).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealizationStats {
    pub t_alpha: f64,
    pub sinr_coverage: f64,
    pub rate_coverage: f64,
    pub energy_saving: f64,
    pub n_users: usize,
    pub n_outage: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fewer than two samples: the interval collapses to the mean.
    pub degenerate: bool,
}

/// Sample mean, sample standard deviation and a normal 95% interval.
/// NaN entries are skipped.
pub fn aggregate(values: &[f64]) -> Summary {
    let v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    let n = v.len();
    if n == 0 {
        return Summary {
            n,
            mean: f64::NAN,
            std: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            degenerate: true,
        };
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Summary {
            n,
            mean,
            std: 0.0,
            ci_low: mean,
            ci_high: mean,
            degenerate: true,
        };
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let half = 1.959_963_984_540_054 * std / (n as f64).sqrt();
    Summary {
        n,
        mean,
        std,
        ci_low: mean - half,
        ci_high: mean + half,
        degenerate: false,
    }
}

/// Bootstrap support for `mean(diffs) ≥ 0`: the share of resampled means
/// that are non-negative.
pub fn bootstrap_nonnegative(diffs: &[f64], resamples: usize, seed: u64) -> f64 {
    if diffs.is_empty() || resamples == 0 {
        return 0.0;
    }
    let mut rng = seed::rng(seed::derive(seed, &[seed::BOOTSTRAP_STREAM]));
    let n = diffs.len();
    let mut hits = 0;
    for _ in 0..resamples {
        let s: f64 = (0..n).map(|_| diffs[rng.random_range(0..n)]).sum();
        if s >= 0.0 {
            hits += 1;
        }
    }
    hits as f64 / resamples as f64
}
