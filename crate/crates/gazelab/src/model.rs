//! Domain types shared across the toolkit.
//!
//! Every type validates its structural invariants at construction and is
//! immutable afterwards, so values can be freely shared across threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("grid expects {expected} image ids ({rows}x{cols}) but got {got}")]
    GridSize {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("duplicate image id `{0}` in grid")]
    DuplicateImageId(String),
    #[error("grid arc must be in (0, 360] degrees, got {0}")]
    InvalidArc(f64),
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("event references unknown image id `{0}`")]
    UnknownImageId(String),
    #[error("event on `{image_id}` has non-positive duration ({t_start} .. {t_end})")]
    NonPositiveDuration {
        image_id: String,
        t_start: f64,
        t_end: f64,
    },
    #[error("event coordinate ({u}, {v}) outside the unit square")]
    CoordinateOutOfRange { u: f64, v: f64 },
    #[error("event timestamp is not finite")]
    NonFiniteTimestamp,
    #[error("events on `{image_id}` overlap in time ({first} .. {second})")]
    OverlappingEvents {
        image_id: String,
        first: f64,
        second: f64,
    },
    #[error("session mixes ids `{0}` and `{1}`; validate one session at a time")]
    MixedSessionIds(String, String),
    #[error("rating must be 1..=5, got {0}")]
    RatingOutOfRange(i64),
    #[error("unknown liked-feature token `{0}`")]
    UnknownFeature(String),
    #[error("ballot of `{expert_id}` repeats candidate `{candidate}`")]
    RepeatedCandidate {
        expert_id: String,
        candidate: String,
    },
    #[error("ballot needs at least two candidates")]
    BallotTooShort,
    #[error("worth for `{0}` must be positive, got {1}")]
    NonPositiveWorth(String, f64),
    #[error("normalized worths must sum to 1 (sum = {0})")]
    WorthsNotNormalized(f64),
    #[error("likert profile needs exactly 8 means, got {0}")]
    ProfileArity(usize),
    #[error("likert mean {0} outside [1, 5]")]
    MeanOutOfRange(f64),
    #[error("palette entry `{0}` is not a #RRGGBB colour")]
    BadHexColour(String),
}

/// The eight evaluation criteria, in the fixed axis order used everywhere a
/// profile is turned into a polygon. The order is part of the contract: the
/// polygon area depends on which criteria are adjacent.
pub const LIKERT_CRITERIA: [&str; 8] = [
    "adherence_to_brief",
    "novelty",
    "visual_appeal",
    "emotional_resonance",
    "clarity_of_purpose",
    "distinctiveness_of_silhouette",
    "implied_materiality",
    "proportional_balance",
];

/// Fixed vocabulary for the "what did you like" multiple-choice answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikedFeature {
    Colour,
    Shape,
    Size,
    Orientation,
    Texture,
}

impl LikedFeature {
    pub const ALL: [LikedFeature; 5] = [
        LikedFeature::Colour,
        LikedFeature::Shape,
        LikedFeature::Size,
        LikedFeature::Orientation,
        LikedFeature::Texture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LikedFeature::Colour => "colour",
            LikedFeature::Shape => "shape",
            LikedFeature::Size => "size",
            LikedFeature::Orientation => "orientation",
            LikedFeature::Texture => "texture",
        }
    }

    pub fn parse(token: &str) -> Result<Self, ModelError> {
        match token.trim().to_ascii_lowercase().as_str() {
            "colour" | "color" => Ok(LikedFeature::Colour),
            "shape" => Ok(LikedFeature::Shape),
            "size" => Ok(LikedFeature::Size),
            "orientation" => Ok(LikedFeature::Orientation),
            "texture" => Ok(LikedFeature::Texture),
            other => Err(ModelError::UnknownFeature(other.to_string())),
        }
    }
}

impl fmt::Display for LikedFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cylindrical stimulus layout: `rows` x `cols` cells spanning `arc_degrees`
/// of azimuth, row-major from the top-left cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusGrid {
    rows: usize,
    cols: usize,
    arc_degrees: f64,
    image_ids: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl StimulusGrid {
    /// Builds a grid, checking the id count, uniqueness and the arc range.
    pub fn new(
        rows: usize,
        cols: usize,
        arc_degrees: f64,
        image_ids: Vec<String>,
    ) -> Result<Self, ModelError> {
        if rows == 0 || cols == 0 {
            return Err(ModelError::EmptyGrid);
        }
        if !(arc_degrees > 0.0 && arc_degrees <= 360.0) {
            return Err(ModelError::InvalidArc(arc_degrees));
        }
        let expected = rows * cols;
        if image_ids.len() != expected {
            return Err(ModelError::GridSize {
                rows,
                cols,
                expected,
                got: image_ids.len(),
            });
        }
        let mut index = HashMap::with_capacity(expected);
        for (i, id) in image_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(ModelError::DuplicateImageId(id.clone()));
            }
        }
        Ok(StimulusGrid {
            rows,
            cols,
            arc_degrees,
            image_ids,
            index,
        })
    }

    /// Default layout used by the study setup: 6 rows x 25 columns over 120 degrees.
    pub fn standard(image_ids: Vec<String>) -> Result<Self, ModelError> {
        StimulusGrid::new(6, 25, 120.0, image_ids)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn arc_degrees(&self) -> f64 {
        self.arc_degrees
    }

    pub fn len(&self) -> usize {
        self.image_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image_ids.is_empty()
    }

    pub fn image_ids(&self) -> &[String] {
        &self.image_ids
    }

    pub fn contains(&self, image_id: &str) -> bool {
        self.index.contains_key(image_id)
    }

    /// Flat row-major index of an image id.
    pub fn index_of(&self, image_id: &str) -> Option<usize> {
        self.index.get(image_id).copied()
    }

    /// (row, col) of a flat index. Inverse of [`StimulusGrid::index_of_cell`].
    pub fn cell_of_index(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    pub fn index_of_cell(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    /// Azimuth of a column centre in degrees: `-arc/2 + arc*(col+0.5)/cols`.
    /// Column 0 sits just inside the left edge of the arc.
    pub fn azimuth_of_col(&self, col: usize) -> f64 {
        -self.arc_degrees / 2.0 + self.arc_degrees * (col as f64 + 0.5) / self.cols as f64
    }

    /// Azimuth of the cell holding `index`.
    pub fn azimuth_of_index(&self, index: usize) -> f64 {
        let (_, col) = self.cell_of_index(index);
        self.azimuth_of_col(col)
    }
}

/// One raw gaze-on-image sample: the gaze rested on `image_id` at normalized
/// image coordinates `(u, v)` over `[t_start, t_end)` seconds of session time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeEvent {
    pub session_id: String,
    pub image_id: String,
    pub t_start: f64,
    pub t_end: f64,
    pub u: f64,
    pub v: f64,
}

impl GazeEvent {
    pub fn new(
        session_id: impl Into<String>,
        image_id: impl Into<String>,
        t_start: f64,
        t_end: f64,
        u: f64,
        v: f64,
    ) -> Result<Self, ModelError> {
        let event = GazeEvent {
            session_id: session_id.into(),
            image_id: image_id.into(),
            t_start,
            t_end,
            u,
            v,
        };
        event.check()?;
        Ok(event)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !self.t_start.is_finite() || !self.t_end.is_finite() {
            return Err(ModelError::NonFiniteTimestamp);
        }
        if self.t_end <= self.t_start {
            return Err(ModelError::NonPositiveDuration {
                image_id: self.image_id.clone(),
                t_start: self.t_start,
                t_end: self.t_end,
            });
        }
        if !(0.0..=1.0).contains(&self.u) || !(0.0..=1.0).contains(&self.v) {
            return Err(ModelError::CoordinateOutOfRange {
                u: self.u,
                v: self.v,
            });
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// A single participant's gaze events, checked against a grid and sorted by
/// start time. Construction rejects unknown image ids, non-positive durations
/// and overlapping intervals on the same image.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSession {
    session_id: String,
    events: Vec<GazeEvent>,
}

impl ValidatedSession {
    /// Validates a batch of events belonging to one session.
    ///
    /// Idempotent: validating the events of a validated session returns an
    /// equal session.
    pub fn validate(events: Vec<GazeEvent>, grid: &StimulusGrid) -> Result<Self, ModelError> {
        let mut session_id = String::new();
        for event in &events {
            event.check()?;
            if !grid.contains(&event.image_id) {
                return Err(ModelError::UnknownImageId(event.image_id.clone()));
            }
            if session_id.is_empty() {
                session_id = event.session_id.clone();
            } else if event.session_id != session_id {
                return Err(ModelError::MixedSessionIds(
                    session_id,
                    event.session_id.clone(),
                ));
            }
        }
        let mut events = events;
        events.sort_by(|a, b| {
            a.t_start
                .total_cmp(&b.t_start)
                .then(a.t_end.total_cmp(&b.t_end))
                .then_with(|| a.image_id.cmp(&b.image_id))
        });
        // Overlap check per image on the sorted order.
        let mut last_end: HashMap<&str, f64> = HashMap::new();
        for event in &events {
            if let Some(&end) = last_end.get(event.image_id.as_str()) {
                if event.t_start < end {
                    return Err(ModelError::OverlappingEvents {
                        image_id: event.image_id.clone(),
                        first: end,
                        second: event.t_start,
                    });
                }
            }
            last_end.insert(event.image_id.as_str(), event.t_end);
        }
        Ok(ValidatedSession { session_id, events })
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn events(&self) -> &[GazeEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Splits a mixed event stream into per-session batches, ordered by session id.
pub fn split_sessions(events: Vec<GazeEvent>) -> Vec<(String, Vec<GazeEvent>)> {
    let mut by_session: BTreeMap<String, Vec<GazeEvent>> = BTreeMap::new();
    for event in events {
        by_session
            .entry(event.session_id.clone())
            .or_default()
            .push(event);
    }
    by_session.into_iter().collect()
}

/// Per-image dwell after merging gaze episodes: the study's fixation duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwellRecord {
    pub image_id: String,
    /// Total merged dwell in seconds; gap time between merged episodes is
    /// never counted.
    pub total_dwell: f64,
    pub episode_count: usize,
    /// Start of the first counted episode, seconds since session start.
    pub first_visit: f64,
}

/// One participant's explicit answer for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub participant_id: String,
    pub image_id: String,
    pub rating: u8,
    pub liked_features: BTreeSet<LikedFeature>,
    pub thought: Option<String>,
}

impl RatingRecord {
    pub fn new(
        participant_id: impl Into<String>,
        image_id: impl Into<String>,
        rating: u8,
        liked_features: BTreeSet<LikedFeature>,
        thought: Option<String>,
    ) -> Result<Self, ModelError> {
        if !(1..=5).contains(&rating) {
            return Err(ModelError::RatingOutOfRange(rating as i64));
        }
        Ok(RatingRecord {
            participant_id: participant_id.into(),
            image_id: image_id.into(),
            rating,
            liked_features,
            thought,
        })
    }
}

/// One expert's total order over the candidate designs of one problem,
/// best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingBallot {
    pub expert_id: String,
    pub problem_id: String,
    order: Vec<String>,
}

impl RankingBallot {
    pub fn new(
        expert_id: impl Into<String>,
        problem_id: impl Into<String>,
        order: Vec<String>,
    ) -> Result<Self, ModelError> {
        let expert_id = expert_id.into();
        if order.len() < 2 {
            return Err(ModelError::BallotTooShort);
        }
        let mut seen = BTreeSet::new();
        for candidate in &order {
            if !seen.insert(candidate.as_str()) {
                return Err(ModelError::RepeatedCandidate {
                    expert_id,
                    candidate: candidate.clone(),
                });
            }
        }
        Ok(RankingBallot {
            expert_id,
            problem_id: problem_id.into(),
            order,
        })
    }

    /// Candidates best first.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    /// The candidate set as a sorted list.
    pub fn candidates(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.order.iter().map(String::as_str).collect();
        c.sort_unstable();
        c
    }
}

/// Latent worth scores for the candidates of one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorthVector {
    pub problem_id: String,
    worths: BTreeMap<String, f64>,
    normalized: bool,
}

impl WorthVector {
    pub fn new(
        problem_id: impl Into<String>,
        worths: BTreeMap<String, f64>,
        normalized: bool,
    ) -> Result<Self, ModelError> {
        for (candidate, &w) in &worths {
            if !(w > 0.0) || !w.is_finite() {
                return Err(ModelError::NonPositiveWorth(candidate.clone(), w));
            }
        }
        if normalized {
            let sum: f64 = worths.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::WorthsNotNormalized(sum));
            }
        }
        Ok(WorthVector {
            problem_id: problem_id.into(),
            worths,
            normalized,
        })
    }

    pub fn worths(&self) -> &BTreeMap<String, f64> {
        &self.worths
    }

    pub fn get(&self, candidate: &str) -> Option<f64> {
        self.worths.get(candidate).copied()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescales the worths to sum to 1. A pure reporting choice: the ranking
    /// model is invariant under positive scaling.
    pub fn normalize(mut self) -> Self {
        let sum: f64 = self.worths.values().sum();
        for w in self.worths.values_mut() {
            *w /= sum;
        }
        self.normalized = true;
        self
    }
}

/// Mean eight-criterion ratings for one rendering, in [`LIKERT_CRITERIA`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertProfile {
    pub rendering_id: String,
    means: Vec<f64>,
}

impl LikertProfile {
    pub fn new(rendering_id: impl Into<String>, means: Vec<f64>) -> Result<Self, ModelError> {
        if means.len() != LIKERT_CRITERIA.len() {
            return Err(ModelError::ProfileArity(means.len()));
        }
        for &m in &means {
            if !(1.0..=5.0).contains(&m) {
                return Err(ModelError::MeanOutOfRange(m));
            }
        }
        Ok(LikertProfile {
            rendering_id: rendering_id.into(),
            means,
        })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn criteria(&self) -> &'static [&'static str; 8] {
        &LIKERT_CRITERIA
    }
}

/// Textual descriptors attached to the feature maps; the key set is fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Descriptors {
    pub shape: String,
    pub texture_style: String,
    pub colour: String,
}

/// The bundle flowing from the perception stages into generation: ROI collage,
/// edge collage, colour palette and the textual descriptors.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMaps {
    pub roi_collage: image::RgbImage,
    pub edge_collage: image::GrayImage,
    /// `(#RRGGBB, descriptive name)` pairs, dominant first.
    pub palette: Vec<(String, String)>,
    pub descriptors: Descriptors,
}

impl FeatureMaps {
    /// Checks that every palette entry is a well-formed `#RRGGBB` string.
    pub fn check(&self) -> Result<(), ModelError> {
        for (hex, _) in &self.palette {
            let ok = hex.len() == 7
                && hex.starts_with('#')
                && hex[1..].chars().all(|c| c.is_ascii_hexdigit());
            if !ok {
                return Err(ModelError::BadHexColour(hex.clone()));
            }
        }
        Ok(())
    }
}
