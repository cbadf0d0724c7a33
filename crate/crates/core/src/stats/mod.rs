//! Situation tallies, rates and the threshold statistic.

mod brt;
mod buckets;
mod situation;
mod tally;

pub use brt::{compute_brt, decide, BrtValue, Decision};
pub use buckets::{bucket_report, group_summary, mean_and_stddev, BucketRow, GroupSummary};
pub use situation::{
    classify_state, extract_observations, is_high_leverage, CountingMode, SituationClass, SituationObservation,
};
pub use tally::{
    all_career_high_leverage_innings, career_high_leverage_innings, merge, rates, AppearanceKey, Cell, CellKey, Rate,
    RateSet, Selector, Stratum, TallyTable,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no observations for {0}")]
    EmptyCell(SituationClass),
    #[error("bucket has no pitchers")]
    EmptyBucket,
}

/// Three-decimal display, ties to even on the binary value.
pub fn round3(x: f64) -> String {
    format!("{x:.3}")
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Range of the threshold over a box of (t, s, f) intervals. The threshold
/// rises with f and s and falls with t, so the corners give the bounds.
pub fn brt_interval(t: (f64, f64), s: (f64, f64), f: (f64, f64)) -> (f64, f64) {
    (compute_brt(t.1, s.0, f.0).brt, compute_brt(t.0, s.1, f.1).brt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_even_on_binary_ties() {
        assert_eq!(round3(0.0625), "0.062");
        assert_eq!(round3(0.1875), "0.188");
        assert_eq!(round3(0.3827), "0.383");
        assert_eq!(round3(1.0), "1.000");
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(50, 100, 2.576);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
        let (lo, _) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn brt_interval_contains_point() {
        let v = compute_brt(0.6, 0.4, 0.15).brt;
        let (lo, hi) = brt_interval((0.58, 0.62), (0.38, 0.42), (0.13, 0.17));
        assert!(lo < v && v < hi);
    }
}
