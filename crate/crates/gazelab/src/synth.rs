//! Seeded synthetic datasets exercising the analysis regimes end to end.
//!
//! Two study-shaped generators: `phase1` couples dwell time to preference
//! ratings over a shared image wall (set `coupling` to 0 for the null
//! regime), and `phase2` gives each participant group its own target image
//! subset, producing a block-structured viewing-commonality matrix. Both are
//! pure functions of their configuration.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use image::{Rgb, RgbImage};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::analytics::HeatGrid;
use crate::model::{GazeEvent, LikedFeature, ModelError, RankingBallot, RatingRecord};
use crate::pipeline::{RunInputs, Stimulus};

/// Standard normal draw via Box–Muller: z = √(−2 ln u₁)·cos(2π u₂).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Free-text snippets occasionally attached to ratings; they deliberately
/// carry emotion-lexicon keywords.
const THOUGHTS: [&str; 8] = [
    "love the texture",
    "furious clutter",
    "beautiful lines",
    "feels revolting",
    "elegant silhouette",
    "rage inducing noise",
    "adore the palette",
    "horrible contrast",
];

/// Configuration for the rating-coupled browsing generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Config {
    pub images: usize,
    pub sessions: usize,
    /// Seconds of extra dwell per rating point. 0 decouples dwell from
    /// preference entirely.
    pub coupling: f64,
    pub seed: u64,
}

impl Default for Phase1Config {
    fn default() -> Self {
        Phase1Config {
            images: 150,
            sessions: 30,
            coupling: 1.5,
            seed: 0,
        }
    }
}

/// Output of [`phase1`]: the image wall, every session's gaze events, and
/// every session's ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Data {
    pub image_ids: Vec<String>,
    pub events: Vec<GazeEvent>,
    pub ratings: Vec<RatingRecord>,
}

/// Generates rating-coupled browsing sessions. Each session rates every
/// image (latent quality plus noise) and views ~35% of them; dwell on a
/// viewed image is `max(0.25, 2 + coupling·rating + N(0,1))` seconds spread
/// over 1–3 episodes. Every image is guaranteed at least one viewer via a
/// deterministic, rating-independent patch visit from the first session.
pub fn phase1(config: &Phase1Config) -> Phase1Data {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let image_ids: Vec<String> = (0..config.images).map(|i| format!("img-{i:03}")).collect();
    let quality: Vec<f64> = (0..config.images)
        .map(|_| rng.random_range(1.0..=5.0))
        .collect();
    let hotspot: Vec<(f64, f64)> = (0..config.images)
        .map(|_| (rng.random_range(0.2..0.8), rng.random_range(0.2..0.8)))
        .collect();

    let mut events = Vec::new();
    let mut ratings = Vec::new();
    let mut viewer_count = vec![0usize; config.images];
    let mut first_session_end = 0.0f64;
    for s in 0..config.sessions {
        let session_id = format!("p1-s{s:02}");
        let mut t = 0.0f64;
        for i in 0..config.images {
            let rating = (quality[i] + 0.8 * normal(&mut rng)).round().clamp(1.0, 5.0) as u8;
            let mut features = BTreeSet::new();
            for feature in LikedFeature::ALL {
                if rng.random::<f64>() < 0.25 {
                    features.insert(feature);
                }
            }
            let thought = if rng.random::<f64>() < 0.1 {
                Some(THOUGHTS[rng.random_range(0..THOUGHTS.len())].to_string())
            } else {
                None
            };
            ratings.push(
                RatingRecord::new(&session_id, &image_ids[i], rating, features, thought)
                    .expect("synthetic rating in range"),
            );
            if rng.random::<f64>() < 0.35 {
                viewer_count[i] += 1;
                let dwell = (2.0 + config.coupling * rating as f64 + normal(&mut rng)).max(0.25);
                let most = ((dwell / 0.3).floor() as usize).clamp(1, 3);
                let episodes = rng.random_range(1..=3usize).min(most);
                let part = dwell / episodes as f64;
                for _ in 0..episodes {
                    let u = (hotspot[i].0 + 0.1 * normal(&mut rng)).clamp(0.05, 0.95);
                    let v = (hotspot[i].1 + 0.1 * normal(&mut rng)).clamp(0.05, 0.95);
                    events.push(
                        GazeEvent::new(&session_id, &image_ids[i], t, t + part, u, v)
                            .expect("valid synthetic event"),
                    );
                    t += part + 0.5;
                }
            }
        }
        if s == 0 {
            first_session_end = t;
        }
    }
    // Coverage patch: brief patch visits keep every image analyzable without
    // touching the rating↔dwell relationship.
    let mut t = first_session_end;
    for i in 0..config.images {
        if viewer_count[i] == 0 {
            events.push(
                GazeEvent::new(
                    "p1-s00",
                    &image_ids[i],
                    t,
                    t + 0.5,
                    hotspot[i].0,
                    hotspot[i].1,
                )
                .expect("valid patch event"),
            );
            t += 1.0;
        }
    }
    Phase1Data {
        image_ids,
        events,
        ratings,
    }
}

/// Configuration for the group-targeted browsing generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Config {
    pub groups: usize,
    pub sessions_per_group: usize,
    pub images: usize,
    pub seed: u64,
}

impl Default for Phase2Config {
    fn default() -> Self {
        Phase2Config {
            groups: 6,
            sessions_per_group: 5,
            images: 150,
            seed: 0,
        }
    }
}

/// Output of [`phase2`].
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Data {
    pub image_ids: Vec<String>,
    pub events: Vec<GazeEvent>,
}

/// Session ids are `p2-g<group>-s<k>`; the group is recoverable from the id.
pub fn phase2_group_of(session_id: &str) -> Option<usize> {
    session_id
        .strip_prefix("p2-g")?
        .split('-')
        .next()?
        .parse()
        .ok()
}

/// Generates group-targeted browsing: the image wall is cut into one
/// contiguous block per group, and a session views block images with
/// probability 0.9 but off-block images with probability 0.1 — so viewing
/// vectors overlap heavily within a group and weakly across groups.
pub fn phase2(config: &Phase2Config) -> Phase2Data {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let image_ids: Vec<String> = (0..config.images).map(|i| format!("img-{i:03}")).collect();
    let block = (config.images / config.groups.max(1)).max(1);
    let mut events = Vec::new();
    for g in 0..config.groups {
        for k in 0..config.sessions_per_group {
            let session_id = format!("p2-g{g}-s{k}");
            let mut t = 0.0f64;
            for (i, image_id) in image_ids.iter().enumerate() {
                let targeted = i / block == g;
                let p = if targeted { 0.9 } else { 0.1 };
                if rng.random::<f64>() < p {
                    let dwell = rng.random_range(0.5..2.5);
                    let u = rng.random_range(0.1..0.9);
                    let v = rng.random_range(0.1..0.9);
                    events.push(
                        GazeEvent::new(&session_id, image_id, t, t + dwell, u, v)
                            .expect("valid synthetic event"),
                    );
                    t += dwell + 0.4;
                }
            }
        }
    }
    Phase2Data { image_ids, events }
}

/// `experts` identical ballots over `order` (best first).
pub fn unanimous_ballots(
    problem_id: &str,
    order: &[String],
    experts: usize,
) -> Result<Vec<RankingBallot>, ModelError> {
    (0..experts)
        .map(|e| RankingBallot::new(format!("expert-{:02}", e + 1), problem_id, order.to_vec()))
        .collect()
}

/// Procedural stimuli for workflow runs: 96×64 images with one high-contrast
/// motif each, plus a 10×10 dwell grid concentrated on the motif.
pub fn pipeline_fixture(problem_statement: &str, images: usize, seed: u64) -> RunInputs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let palette_choices: [[u8; 3]; 6] = [
        [196, 64, 48],
        [48, 96, 196],
        [240, 196, 64],
        [64, 160, 96],
        [150, 60, 160],
        [230, 120, 40],
    ];
    let mut stimuli = Vec::new();
    for i in 0..images.max(1) {
        let mut image = RgbImage::from_pixel(96, 64, Rgb([238, 236, 230]));
        let colour = palette_choices[rng.random_range(0..palette_choices.len())];
        let cx = rng.random_range(24..72) as i64;
        let cy = rng.random_range(16..48) as i64;
        let half_w = rng.random_range(8..20) as i64;
        let half_h = rng.random_range(6..14) as i64;
        let disc = rng.random::<f64>() < 0.5;
        for y in 0..64i64 {
            for x in 0..96i64 {
                let inside = if disc {
                    let dx = (x - cx) as f64 / half_w as f64;
                    let dy = (y - cy) as f64 / half_h as f64;
                    dx * dx + dy * dy <= 1.0
                } else {
                    (x - cx).abs() <= half_w && (y - cy).abs() <= half_h
                };
                if inside {
                    image.put_pixel(x as u32, y as u32, Rgb(colour));
                }
            }
        }
        let mut heat = HeatGrid::zeros(10, 10);
        let col = ((cx * 10 / 96) as usize).min(9);
        let row = ((cy * 10 / 64) as usize).min(9);
        heat.add(col, row, 3.0 + rng.random::<f64>());
        heat.add((col + 1).min(9), row, 1.5 + 0.5 * rng.random::<f64>());
        // Faint background interest that stays below the auto threshold.
        heat.add(rng.random_range(0..10), rng.random_range(0..10), 0.1);
        stimuli.push(Stimulus {
            image_id: format!("fix-{i:02}"),
            image,
            heat,
        });
    }
    RunInputs {
        problem_statement: problem_statement.to_string(),
        stimuli,
    }
}
