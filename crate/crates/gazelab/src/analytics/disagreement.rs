//! Disagreement scoring: rating variability scaled by viewer coverage,
//! D = (σ(R)/2) · (n/T).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytics::AnalyticsError;
use crate::model::RatingRecord;

/// Disagreement for one image: σ is the population standard deviation of its
/// ratings, n the number of raters, T the cohort size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisagreementScore {
    pub image_id: String,
    pub sigma: f64,
    pub n: usize,
    pub cohort: usize,
    pub d: f64,
}

/// Computes one score per rated image. Population (not sample) standard
/// deviation keeps D in [0, 1]: the largest possible σ on a 1–5 scale is 2,
/// matching the /2 normalization.
pub fn disagreement_scores(
    ratings: &[RatingRecord],
    cohort: usize,
) -> Result<Vec<DisagreementScore>, AnalyticsError> {
    if cohort == 0 {
        return Err(AnalyticsError::ZeroCohort);
    }
    let mut by_image: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in ratings {
        by_image
            .entry(r.image_id.as_str())
            .or_default()
            .push(r.rating as f64);
    }
    let mut out = Vec::with_capacity(by_image.len());
    for (image_id, values) in by_image {
        let n = values.len();
        if n > cohort {
            return Err(AnalyticsError::CohortTooSmall {
                t: cohort,
                n,
                image_id: image_id.to_string(),
            });
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sigma = variance.sqrt();
        out.push(DisagreementScore {
            image_id: image_id.to_string(),
            sigma,
            n,
            cohort,
            d: (sigma / 2.0) * (n as f64 / cohort as f64),
        });
    }
    Ok(out)
}

/// Summarizes scores two ways: the unweighted mean over images, and the
/// rater-count-weighted mean. Both are reported because either reading of
/// "average disagreement" is defensible.
pub fn disagreement_summary(scores: &[DisagreementScore]) -> (f64, f64) {
    if scores.is_empty() {
        return (0.0, 0.0);
    }
    let unweighted = scores.iter().map(|s| s.d).sum::<f64>() / scores.len() as f64;
    let weight: f64 = scores.iter().map(|s| s.n as f64).sum();
    let weighted = scores.iter().map(|s| s.d * s.n as f64).sum::<f64>() / weight;
    (unweighted, weighted)
}
