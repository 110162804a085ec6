//! Bootstrap estimation of error statistics with percentile confidence
//! intervals.
//!
//! Resamples are drawn with replacement; resample `r` uses its own
//! [`SplitMix64`] substream keyed by `(seed, r)`, so summaries are
//! identical no matter how or in what order the resamples are evaluated.
//! Confidence intervals are the empirical 2.5 and 97.5 percentiles of the
//! resample statistics (linear interpolation between order statistics).

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::metrics::{self, PairedSeries};
use crate::rng::{substream, SplitMix64};

/// Statistic to bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    /// Sample standard deviation (N−1 denominator).
    Std,
}

impl Statistic {
    fn evaluate(self, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        match self {
            Statistic::Mean => mean,
            Statistic::Std => {
                if values.len() < 2 {
                    return 0.0;
                }
                let var =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                math::sqrt(var)
            }
        }
    }
}

/// Point estimate plus bootstrap spread and 95% percentile interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub statistic: Statistic,
    /// The statistic of the original sample.
    pub point: f64,
    /// Standard deviation of the B resample statistics.
    pub boot_std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub b: u32,
    pub seed: u64,
}

/// Bootstrap `statistic` over `sample` with `b` resamples of size N.
pub fn bootstrap(sample: &[f64], statistic: Statistic, b: u32, seed: u64) -> Result<BootstrapSummary> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if b == 0 {
        return Err(Error::InvalidHyperparameter("bootstrap needs B >= 1"));
    }
    let n = sample.len();
    let mut stats = Vec::with_capacity(b as usize);
    let mut resample = Vec::with_capacity(n);
    for rep in 0..b {
        let mut rng = SplitMix64::new(substream(seed, rep as u64));
        resample.clear();
        for _ in 0..n {
            resample.push(sample[rng.next_index(n)]);
        }
        stats.push(statistic.evaluate(&resample));
    }

    let point = statistic.evaluate(sample);
    let boot_std = if stats.len() < 2 {
        0.0
    } else {
        let m = stats.iter().sum::<f64>() / stats.len() as f64;
        math::sqrt(
            stats.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (stats.len() - 1) as f64,
        )
    };
    stats.sort_unstable_by(f64::total_cmp);

    Ok(BootstrapSummary {
        statistic,
        point,
        boot_std,
        ci_low: percentile(&stats, 0.025),
        ci_high: percentile(&stats, 0.975),
        b,
        seed,
    })
}

/// Linear-interpolation percentile of an already-sorted slice, q in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Forecast-error statistics for one variable at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonErrorStats {
    pub horizon: u8,
    pub n_pairs: usize,
    /// Signed mean of observed − forecast; negative means overestimation.
    pub bias: f64,
    /// Bootstrap of the mean absolute error.
    pub mae: BootstrapSummary,
    /// Bootstrap of the absolute-error population standard deviation. Kept
    /// alongside `mae.boot_std` (the spread of the MAE estimate itself)
    /// because the two spreads answer different questions.
    pub abs_error_std: BootstrapSummary,
}

/// Per-horizon error statistics from (observed, forecast) pairs.
///
/// `pairs_by_horizon[d]` holds the pairs at horizon d+1 days. Horizons
/// with no pairs yield `None` rather than an error.
pub fn horizon_error_stats(
    pairs_by_horizon: &[Vec<(f64, f64)>],
    b: u32,
    seed: u64,
) -> Result<Vec<Option<HorizonErrorStats>>> {
    pairs_by_horizon
        .iter()
        .enumerate()
        .map(|(d, pairs)| {
            if pairs.is_empty() {
                return Ok(None);
            }
            let observed: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let forecast: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let abs_errors: Vec<f64> =
                pairs.iter().map(|(o, f)| (o - f).abs()).collect();
            let series = PairedSeries::new(&observed, &forecast)?;
            Ok(Some(HorizonErrorStats {
                horizon: d as u8 + 1,
                n_pairs: pairs.len(),
                bias: metrics::bias(&series),
                mae: bootstrap(&abs_errors, Statistic::Mean, b, substream(seed, 2 * d as u64))?,
                abs_error_std: bootstrap(
                    &abs_errors,
                    Statistic::Std,
                    b,
                    substream(seed, 2 * d as u64 + 1),
                )?,
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_degenerates() {
        let sample = vec![5.5; 20];
        let summary = bootstrap(&sample, Statistic::Mean, 200, 9).unwrap();
        assert_eq!(summary.point, 5.5);
        assert_eq!(summary.boot_std, 0.0);
        assert_eq!(summary.ci_low, 5.5);
        assert_eq!(summary.ci_high, 5.5);
    }

    #[test]
    fn bootstrap_is_bitwise_deterministic() {
        let sample: Vec<f64> = (0..50).map(|i| (i as f64 * 0.77).sin()).collect();
        let a = bootstrap(&sample, Statistic::Mean, 500, 1234).unwrap();
        let b = bootstrap(&sample, Statistic::Mean, 500, 1234).unwrap();
        assert_eq!(a, b);
        let c = bootstrap(&sample, Statistic::Mean, 500, 1235).unwrap();
        assert_ne!(a.ci_low.to_bits(), c.ci_low.to_bits());
    }

    #[test]
    fn mean_resamples_stay_within_sample_range() {
        let sample: Vec<f64> = (0..30).map(|i| (i as f64) * 1.3 - 7.0).collect();
        let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let summary = bootstrap(&sample, Statistic::Mean, 2000, 3).unwrap();
        assert!(summary.ci_low >= lo && summary.ci_high <= hi);
        assert!(summary.ci_low <= summary.ci_high);
    }

    #[test]
    fn ci_width_tracks_the_clt_for_a_unit_variance_sample() {
        // mean of n=200 unit-variance draws has SE 1/√200, so the 95%
        // percentile interval should be close to 2·1.96/√200 ≈ 0.277
        let mut rng = crate::rng::SplitMix64::new(42);
        let expected = 2.0 * 1.96 / (200.0_f64).sqrt();
        let mut widths = Vec::new();
        for trial in 0..20 {
            let sample: Vec<f64> = (0..200).map(|_| rng.next_normal()).collect();
            let summary = bootstrap(&sample, Statistic::Mean, 2500, trial).unwrap();
            widths.push(summary.ci_high - summary.ci_low);
        }
        let mean_width = widths.iter().sum::<f64>() / widths.len() as f64;
        assert!(
            (mean_width - expected).abs() < 0.25 * expected,
            "mean width {mean_width} vs CLT {expected}"
        );
    }

    #[test]
    fn rejects_empty_sample_and_zero_b() {
        assert_eq!(bootstrap(&[], Statistic::Mean, 10, 0).unwrap_err(), Error::EmptySample);
        assert!(matches!(
            bootstrap(&[1.0], Statistic::Mean, 0, 0),
            Err(Error::InvalidHyperparameter(_))
        ));
    }

    #[test]
    fn perfect_forecasts_zero_out_every_horizon() {
        let pairs: Vec<Vec<(f64, f64)>> = (0..6)
            .map(|_| (0..40).map(|i| (i as f64 + 1.0, i as f64 + 1.0)).collect())
            .collect();
        let stats = horizon_error_stats(&pairs, 100, 7).unwrap();
        for entry in stats {
            let s = entry.unwrap();
            assert_eq!(s.bias, 0.0);
            assert_eq!(s.mae.point, 0.0);
            assert_eq!(s.mae.ci_low, 0.0);
            assert_eq!(s.mae.ci_high, 0.0);
        }
    }

    #[test]
    fn horizon_scaled_noise_gives_increasing_mae() {
        let mut rng = crate::rng::SplitMix64::new(99);
        let pairs: Vec<Vec<(f64, f64)>> = (0..6)
            .map(|d| {
                let sigma = 0.5 * (d + 1) as f64;
                (0..500)
                    .map(|_| {
                        let obs = rng.next_range(20.0, 80.0);
                        (obs, obs + sigma * rng.next_normal())
                    })
                    .collect()
            })
            .collect();
        let stats = horizon_error_stats(&pairs, 500, 11).unwrap();
        let means: Vec<f64> = stats.iter().map(|s| s.as_ref().unwrap().mae.point).collect();
        for pair in means.windows(2) {
            assert!(pair[1] > pair[0], "MAE not increasing: {means:?}");
        }
    }

    #[test]
    fn missing_horizon_is_none_not_fatal() {
        let pairs = vec![
            vec![(1.0, 2.0), (3.0, 3.5)],
            Vec::new(),
            vec![(2.0, 2.0)],
        ];
        let stats = horizon_error_stats(&pairs, 50, 1).unwrap();
        assert!(stats[0].is_some());
        assert!(stats[1].is_none());
        assert!(stats[2].is_some());
        assert_eq!(stats[2].as_ref().unwrap().horizon, 3);
    }
}
