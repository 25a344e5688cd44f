//! Outcome metrics for a finished run and cross-replication aggregation.
//!
//! Two recommender-performance metrics (likes and watch-rate percentages),
//! two opinion-distribution metrics (dispersion and radicalisation), the
//! virality dominance share, and normal-approximation 95% confidence
//! intervals over replications.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("need at least 2 replications to aggregate, got {0}")]
    TooFewReplications(usize),
}

/// Headline metrics of one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    /// Likes as a percentage of all recommendations made.
    pub likes_pct: f64,
    /// Mean watch rate over all recommendations, as a percentage.
    pub watch_rate_pct: f64,
    /// Dispersion of the final opinions (twice the mean absolute
    /// deviation from the population mean).
    pub dispersion: f64,
    /// Mean squared final opinion.
    pub radicalisation: f64,
    /// Share of all likes captured by the single most-liked content.
    pub dominance: f64,
    /// Stance of that most-liked content.
    pub viral_stance: f64,
}

/// Mean, sample standard deviation, and 95% confidence interval over a
/// set of replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStat {
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub rep_count: usize,
}

/// Total likes as a percentage of the `n * tau` recommendations issued.
pub fn likes_pct(total_likes: u64, users: usize, steps: usize) -> f64 {
    100.0 * total_likes as f64 / (users as f64 * steps as f64)
}

/// Summed watch rates as a percentage of the `n * tau` recommendations.
pub fn watch_rate_pct(watch_sum: f64, users: usize, steps: usize) -> f64 {
    100.0 * watch_sum / (users as f64 * steps as f64)
}

/// Dispersion: `(2/n) * sum_i |x_i - mean|`. Zero for a consensus, 2 for
/// an even split across the ends of the opinion interval.
pub fn dispersion(opinions: &[f64]) -> f64 {
    assert!(!opinions.is_empty());
    let n = opinions.len() as f64;
    let mean = opinions.iter().sum::<f64>() / n;
    2.0 * opinions.iter().map(|x| (x - mean).abs()).sum::<f64>() / n
}

/// Radicalisation: mean squared opinion; 1 when everyone sits at an
/// extreme.
pub fn radicalisation(opinions: &[f64]) -> f64 {
    assert!(!opinions.is_empty());
    let n = opinions.len() as f64;
    opinions.iter().map(|x| x * x).sum::<f64>() / n
}

/// Percentage change from `initial` to `final_value`; `None` when the
/// initial value is zero (reported as missing rather than fabricated).
pub fn pct_change(final_value: f64, initial: f64) -> Option<f64> {
    if initial == 0.0 {
        None
    } else {
        Some(100.0 * (final_value - initial) / initial)
    }
}

/// Share of total likes captured by the most-liked content, plus its
/// index. Ties break towards the stance closest to 0, then the lowest
/// index; a like-free run reports dominance 0 at the tie-break index.
pub fn dominance(cumulative_likes: &[u64], stances: &[f64]) -> (f64, usize) {
    assert_eq!(cumulative_likes.len(), stances.len());
    assert!(!cumulative_likes.is_empty());
    let mut best = 0usize;
    for j in 1..cumulative_likes.len() {
        let better = cumulative_likes[j] > cumulative_likes[best]
            || (cumulative_likes[j] == cumulative_likes[best]
                && stances[j].abs() < stances[best].abs());
        if better {
            best = j;
        }
    }
    let total: u64 = cumulative_likes.iter().sum();
    let share = if total == 0 {
        0.0
    } else {
        cumulative_likes[best] as f64 / total as f64
    };
    (share, best)
}

/// Mean, sample std, and normal-approximation 95% CI over replications.
pub fn aggregate(values: &[f64]) -> Result<AggregateStat, MetricsError> {
    let n = values.len();
    if n < 2 {
        return Err(MetricsError::TooFewReplications(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let std = var.sqrt();
    let half_width = 1.96 * std / (n as f64).sqrt();
    Ok(AggregateStat {
        mean,
        std,
        ci_low: mean - half_width,
        ci_high: mean + half_width,
        rep_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn likes_pct_arithmetic() {
        assert_eq!(likes_pct(500 * 1000, 500, 1000), 100.0);
        assert_eq!(likes_pct(0, 500, 1000), 0.0);
        assert_eq!(likes_pct(375_000, 500, 1000), 75.0);
    }

    #[test]
    fn watch_rate_pct_arithmetic() {
        assert_eq!(watch_rate_pct(500_000.0, 500, 1000), 100.0);
        assert_eq!(watch_rate_pct(250_000.0, 500, 1000), 50.0);
        assert_eq!(watch_rate_pct(300_000.0, 500, 1000), 60.0);
    }

    #[test]
    fn dispersion_hand_cases() {
        assert_eq!(dispersion(&[0.25, 0.25, 0.25]), 0.0);
        assert!(dispersion(&[0.4, 0.4, 0.4]) < 1e-15);
        assert_eq!(dispersion(&[-1.0, -1.0, 1.0, 1.0]), 2.0);
        assert!((dispersion(&[-0.5, 0.0, 0.5]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn radicalisation_hand_cases() {
        assert_eq!(radicalisation(&[0.0, 0.0]), 0.0);
        assert_eq!(radicalisation(&[-1.0, 1.0, 1.0]), 1.0);
        assert!((radicalisation(&[-0.5, 0.0, 0.5]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn pct_change_cases() {
        assert_eq!(pct_change(0.3, 0.3), Some(0.0));
        assert!((pct_change(0.3, 0.2).unwrap() - 50.0).abs() < 1e-12);
        assert!((pct_change(0.2, 0.4).unwrap() + 50.0).abs() < 1e-12);
        assert_eq!(pct_change(0.5, 0.0), None);
    }

    #[test]
    fn dominance_cases() {
        let stances = [-1.0, 0.0, 1.0];
        assert_eq!(dominance(&[0, 0, 12], &stances), (1.0, 2));
        assert_eq!(dominance(&[100, 700, 200], &stances), (0.7, 1));
        let (share, _) = dominance(&[5, 5, 5, 5], &[-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]);
        assert_eq!(share, 0.25);
    }

    #[test]
    fn dominance_ties_break_towards_neutral_then_low_index() {
        // Symmetric k = 2 tie: both extremes equally close to 0, lowest wins.
        assert_eq!(dominance(&[7, 7], &[-1.0, 1.0]).1, 0);
        // The neutral stance wins a three-way tie even at a higher index.
        assert_eq!(dominance(&[4, 4, 4], &[-1.0, 1.0, 0.0]).1, 2);
        // No likes at all: share 0 at the tie-break index.
        assert_eq!(dominance(&[0, 0, 0], &[-1.0, 0.0, 1.0]), (0.0, 1));
    }

    #[test]
    fn aggregate_hand_cases() {
        let all_equal = aggregate(&[3.5, 3.5, 3.5]).unwrap();
        assert_eq!(all_equal.mean, 3.5);
        assert_eq!(all_equal.std, 0.0);
        assert_eq!((all_equal.ci_low, all_equal.ci_high), (3.5, 3.5));

        let two = aggregate(&[0.0, 10.0]).unwrap();
        assert!((two.mean - 5.0).abs() < 1e-12);
        assert!((two.std - 7.0710678118654755).abs() < 1e-12);
        assert!((two.ci_low - (5.0 - 9.8)).abs() < 1e-12);
        assert!((two.ci_high - (5.0 + 9.8)).abs() < 1e-12);

        assert_eq!(
            aggregate(&[1.0]).unwrap_err(),
            MetricsError::TooFewReplications(1)
        );
    }

    #[test]
    fn ci_width_shrinks_as_inverse_sqrt_reps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let noise: Vec<f64> = (0..40_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let small = aggregate(&noise[..10_000]).unwrap();
        let large = aggregate(&noise).unwrap();
        let ratio = (small.ci_high - small.ci_low) / (large.ci_high - large.ci_low);
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    fn naive_dispersion(xs: &[f64]) -> f64 {
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let mut acc = 0.0;
        for x in xs {
            acc += (x - mean).abs();
        }
        2.0 / xs.len() as f64 * acc
    }

    fn naive_radicalisation(xs: &[f64]) -> f64 {
        let mut acc = 0.0;
        for x in xs {
            acc += x * x;
        }
        acc / xs.len() as f64
    }

    proptest! {
        #[test]
        fn matches_naive_reference(
            xs in proptest::collection::vec(-1.0f64..=1.0, 1..=8),
        ) {
            prop_assert!((dispersion(&xs) - naive_dispersion(&xs)).abs() < 1e-12);
            prop_assert!((radicalisation(&xs) - naive_radicalisation(&xs)).abs() < 1e-12);
        }

        #[test]
        fn dispersion_translation_invariant_radicalisation_not(
            xs in proptest::collection::vec(-0.5f64..=0.5, 2..=16),
            shift in 0.05f64..=0.5,
        ) {
            let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
            prop_assert!((dispersion(&xs) - dispersion(&shifted)).abs() < 1e-12);
            let not_all_mirrored = xs.iter().sum::<f64>().abs() > 1e-6
                || xs.iter().map(|x| x * x).sum::<f64>() > 1e-6;
            if not_all_mirrored {
                let before = radicalisation(&xs);
                let after = radicalisation(&shifted);
                // Shifting changes the second moment unless the cross term
                // cancels exactly; guard against that measure-zero case.
                let cross = 2.0 * shift * xs.iter().sum::<f64>() / xs.len() as f64;
                if (cross + shift * shift).abs() > 1e-9 {
                    prop_assert!((before - after).abs() > 1e-12);
                }
            }
        }

        #[test]
        fn both_metrics_scale_with_magnitude(
            xs in proptest::collection::vec(-1.0f64..=1.0, 2..=16),
            c in -1.0f64..=1.0,
        ) {
            let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
            prop_assert!(
                (dispersion(&scaled) - c.abs() * dispersion(&xs)).abs() < 1e-12
            );
            prop_assert!(
                (radicalisation(&scaled).sqrt() - c.abs() * radicalisation(&xs).sqrt()).abs()
                    < 1e-12
            );
        }
    }
}
