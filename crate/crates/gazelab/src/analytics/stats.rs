//! Correlation and two-sample statistics with exact Student-t p-values.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::analytics::AnalyticsError;

/// Product-moment correlation with its two-tailed significance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    pub t_stat: f64,
    pub p_two_tailed: f64,
}

/// Two-sample comparison of dwell between rating-median-split groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub mean_high: f64,
    pub mean_low: f64,
    pub t_stat: f64,
    pub p_two_tailed: f64,
    pub n_high: usize,
    pub n_low: usize,
}

/// Which two-sample t statistic to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TTestKind {
    /// Welch's unequal-variance t with Welch–Satterthwaite df. The safer
    /// default when group variances may differ.
    #[default]
    Welch,
    /// Classic pooled-variance Student's t with df = n1 + n2 − 2.
    Pooled,
}

/// Median of a slice (mean of the middle two for even lengths).
/// Returns NaN for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Two-tailed p-value of a Student-t statistic with `df` degrees of freedom,
/// via the regularized incomplete beta function:
/// P(|T| > t) = I_{df/(df+t²)}(df/2, 1/2).
pub fn two_tailed_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
fn sample_variance(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

/// Pearson product-moment correlation of two equal-length series, with the
/// two-tailed p-value of t = r·sqrt((n−2)/(1−r²)) at df = n − 2.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult, AnalyticsError> {
    if xs.len() != ys.len() {
        return Err(AnalyticsError::MismatchedLengths(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 3 {
        return Err(AnalyticsError::TooFewPoints { need: 3, got: n });
    }
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::ConstantSeries);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let t_stat = if r.abs() >= 1.0 {
        f64::INFINITY * r.signum()
    } else {
        r * (df / (1.0 - r * r)).sqrt()
    };
    Ok(CorrelationResult {
        r,
        n,
        t_stat,
        p_two_tailed: two_tailed_p(t_stat, df),
    })
}

/// Splits images at the median rating (high = strictly above, low = at or
/// below) and compares their dwell with a two-sample t-test.
pub fn median_split_ttest(
    ratings: &[f64],
    dwells: &[f64],
    kind: TTestKind,
) -> Result<TTestResult, AnalyticsError> {
    if ratings.len() != dwells.len() {
        return Err(AnalyticsError::MismatchedLengths(ratings.len(), dwells.len()));
    }
    let cut = median(ratings);
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (rating, dwell) in ratings.iter().zip(dwells) {
        if *rating > cut {
            high.push(*dwell);
        } else {
            low.push(*dwell);
        }
    }
    if high.len() < 2 || low.len() < 2 {
        return Err(AnalyticsError::DegenerateSplit {
            n_high: high.len(),
            n_low: low.len(),
        });
    }
    let (n1, n2) = (high.len() as f64, low.len() as f64);
    let (m1, m2) = (mean(&high), mean(&low));
    let (v1, v2) = (sample_variance(&high, m1), sample_variance(&low, m2));
    let (se2, df) = match kind {
        TTestKind::Welch => {
            let se2 = v1 / n1 + v2 / n2;
            let denom = (v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0);
            let df = if denom > 0.0 { se2 * se2 / denom } else { n1 + n2 - 2.0 };
            (se2, df)
        }
        TTestKind::Pooled => {
            let df = n1 + n2 - 2.0;
            let sp2 = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;
            (sp2 * (1.0 / n1 + 1.0 / n2), df)
        }
    };
    let diff = m1 - m2;
    // Zero-variance groups are legal inputs: equal means give t = 0, unequal
    // means give an infinite t (p = 0).
    let t_stat = if diff == 0.0 {
        0.0
    } else if se2 > 0.0 {
        diff / se2.sqrt()
    } else {
        f64::INFINITY * diff.signum()
    };
    Ok(TTestResult {
        mean_high: m1,
        mean_low: m2,
        t_stat,
        p_two_tailed: two_tailed_p(t_stat, df),
        n_high: high.len(),
        n_low: low.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_linear_correlation() {
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(r.r, 1.0);
        assert_eq!(r.p_two_tailed, 0.0);
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.r, -1.0);
    }

    #[test]
    fn matches_raw_sums_formula() {
        // Independent oracle: the uncentered raw-sums form of r.
        let xs: Vec<f64> = (0..20).map(|i| ((i * 37) % 17) as f64 + 0.25).collect();
        let ys: Vec<f64> = (0..20).map(|i| ((i * 53) % 23) as f64 - 3.5).collect();
        let n = xs.len() as f64;
        let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let syy: f64 = ys.iter().map(|y| y * y).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let oracle =
            (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
        let got = pearson(&xs, &ys).unwrap();
        assert!((got.r - oracle).abs() < 1e-12);
    }

    #[test]
    fn degenerate_correlation_inputs() {
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            AnalyticsError::ConstantSeries
        );
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(AnalyticsError::TooFewPoints { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(AnalyticsError::MismatchedLengths(3, 2))
        ));
    }

    #[test]
    fn p_value_closed_forms() {
        // df = 1: P(|T| > t) = 1 − (2/π)·atan(t).
        for t in [0.5f64, 1.0, 2.0, 7.5] {
            let expect = 1.0 - (2.0 / std::f64::consts::PI) * t.atan();
            assert!((two_tailed_p(t, 1.0) - expect).abs() < 1e-10, "t = {t}");
        }
        // df = 2: P(|T| > t) = 1 − t/sqrt(t² + 2).
        for t in [0.25f64, 1.0, 3.0, 10.0] {
            let expect = 1.0 - t / (t * t + 2.0).sqrt();
            assert!((two_tailed_p(t, 2.0) - expect).abs() < 1e-10, "t = {t}");
        }
        assert_eq!(two_tailed_p(0.0, 5.0), 1.0);
        assert_eq!(two_tailed_p(f64::INFINITY, 5.0), 0.0);
    }

    #[test]
    fn p_value_symmetry_and_monotonicity() {
        for df in [1.0, 4.0, 30.0, 148.0] {
            assert_eq!(two_tailed_p(2.5, df), two_tailed_p(-2.5, df));
            assert!(two_tailed_p(2.0, df) < two_tailed_p(1.0, df));
        }
    }

    #[test]
    fn p_value_magnitudes_at_large_df() {
        // t ≈ 3.08 at df = 148 sits in the "p ≈ 0.0025" band.
        let p = two_tailed_p(3.0830, 148.0);
        assert!(p > 0.002 && p < 0.003, "p = {p}");
        // r ≈ 0.38 over 150 points (t ≈ 5.03) is far below p = 1e-4.
        assert!(two_tailed_p(5.0270, 148.0) < 1e-4);
    }

    #[test]
    fn welch_matches_hand_formula() {
        // High dwells {10, 12}, low {5, 7}: t = 5/sqrt(2), Welch df = 2.
        let ratings = [4.0, 5.0, 1.0, 2.0];
        let dwells = [10.0, 12.0, 5.0, 7.0];
        let t = median_split_ttest(&ratings, &dwells, TTestKind::Welch).unwrap();
        assert_eq!(t.n_high, 2);
        assert_eq!(t.n_low, 2);
        assert_eq!(t.mean_high, 11.0);
        assert_eq!(t.mean_low, 6.0);
        let expect_t = 5.0 / 2.0f64.sqrt();
        assert!((t.t_stat - expect_t).abs() < 1e-12);
        let expect_p = 1.0 - expect_t / (expect_t * expect_t + 2.0).sqrt();
        assert!((t.p_two_tailed - expect_p).abs() < 1e-10);
    }

    #[test]
    fn pooled_matches_hand_formula() {
        let ratings = [4.0, 5.0, 1.0, 2.0];
        let dwells = [10.0, 12.0, 5.0, 7.0];
        let t = median_split_ttest(&ratings, &dwells, TTestKind::Pooled).unwrap();
        // Same variances on both sides, so pooled t equals Welch t here,
        // but df = 2 is now exact by construction.
        assert!((t.t_stat - 5.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_group_dwell_gives_t_zero() {
        let ratings = [4.0, 5.0, 1.0, 2.0];
        let dwells = [6.0, 6.0, 6.0, 6.0];
        let t = median_split_ttest(&ratings, &dwells, TTestKind::Welch).unwrap();
        assert_eq!(t.t_stat, 0.0);
        assert_eq!(t.p_two_tailed, 1.0);
    }

    #[test]
    fn degenerate_split_detected() {
        // All ratings equal: nothing is strictly above the median.
        let err = median_split_ttest(&[3.0; 6], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], TTestKind::Welch)
            .unwrap_err();
        assert!(matches!(err, AnalyticsError::DegenerateSplit { n_high: 0, .. }));
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    proptest! {
        /// r(x, a·x + b) = ±1 depending on the sign of a.
        #[test]
        fn affine_images_correlate_perfectly(
            xs in prop::collection::vec(-100.0f64..100.0, 3..40),
            a in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
            b in -50.0f64..50.0,
        ) {
            // Skip near-constant series, where r is undefined.
            let spread = xs.iter().cloned().fold(f64::MIN, f64::max)
                - xs.iter().cloned().fold(f64::MAX, f64::min);
            prop_assume!(spread > 1e-6);
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let r = pearson(&xs, &ys).unwrap().r;
            prop_assert!((r - a.signum()).abs() < 1e-9);
        }

        /// p-values always land in [0, 1].
        #[test]
        fn p_in_unit_interval(t in -50.0f64..50.0, df in 1.0f64..500.0) {
            let p = two_tailed_p(t, df);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
