//! Offline analytics and generation orchestration for gaze-driven design sessions.
//!
//! The toolkit ingests logged gaze sessions, preference ratings and expert
//! ranking ballots, and turns them into quantitative outputs:
//!
//! - attention statistics (dwell aggregation, correlation, median-split test,
//!   viewing commonality, disagreement scores, heatmaps, emotion keywords),
//! - region-of-interest feature maps (ROI collage, edge collage, colour palette),
//! - latent worth scores fitted to ranking ballots,
//! - design-effectiveness scores from eight-criterion rating profiles,
//! - a staged, deterministic generation pipeline over pluggable agents.
//!
//! Everything here is pure and deterministic for a given input and seed; the
//! only side effects live in the [`pipeline`] runner (file output) and the
//! optional external agent client.

pub mod analytics;
pub mod effect;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod roi;
pub mod synth;
pub mod worth;

pub use model::{
    DwellRecord, FeatureMaps, GazeEvent, LikertProfile, RankingBallot, RatingRecord, StimulusGrid,
    ValidatedSession, WorthVector,
};
