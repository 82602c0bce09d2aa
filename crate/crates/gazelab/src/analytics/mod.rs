//! Attention analytics: dwell aggregation, correlation and median-split
//! statistics, pairwise viewing commonality, disagreement scoring, gaze
//! heatmaps, and emotion-keyword distributions.

mod commonality;
mod disagreement;
mod dwell;
mod emotion;
mod heatmap;
mod stats;

pub use commonality::{viewing_commonality, CommonalityMatrix};
pub use disagreement::{disagreement_scores, disagreement_summary, DisagreementScore};
pub use dwell::{aggregate_dwell, session_time_split, DwellConfig};
pub use emotion::{default_lexicon, emotion_keyword_distribution, EmotionCounts, Lexicon};
pub use heatmap::{image_heatmap, HeatGrid};
pub use stats::{
    median, median_split_ttest, pearson, two_tailed_p, CorrelationResult, TTestKind, TTestResult,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("series lengths differ ({0} vs {1})")]
    MismatchedLengths(usize, usize),
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("correlation is undefined for a constant series")]
    ConstantSeries,
    #[error("median split is degenerate: {n_high} above / {n_low} at-or-below the median")]
    DegenerateSplit { n_high: usize, n_low: usize },
    #[error("need at least 2 sessions with a non-empty view set, got {0}")]
    TooFewSessions(usize),
    #[error("dwell ({dwell:.3} s) exceeds the stated session length ({session_length:.3} s)")]
    InconsistentSessionLength { dwell: f64, session_length: f64 },
    #[error("cohort size must be positive")]
    ZeroCohort,
    #[error("cohort size {t} is smaller than the {n} viewers of `{image_id}`")]
    CohortTooSmall { t: usize, n: usize, image_id: String },
    #[error("heatmap resolution must be positive in both dimensions")]
    ZeroResolution,
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("gaze point ({u}, {v}) outside the unit square")]
    PointOutOfRange { u: f64, v: f64 },
    #[error("episode duration must be positive, got {0}")]
    NonPositiveDuration(f64),
}
