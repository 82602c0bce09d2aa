//! Spider-polygon effectiveness scores for rated renderings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LikertProfile, ModelError, LIKERT_CRITERIA};

#[derive(Debug, Error, PartialEq)]
pub enum EffectError {
    #[error("need at least one expert row")]
    EmptyMatrix,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Polygon-area score for one rendering, as a percentage of the best
/// achievable profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessResult {
    pub rendering_id: String,
    pub area: f64,
    pub max_area: f64,
    /// 100 · area / max_area, in [4, 100] for 1–5 scale profiles.
    pub effectiveness: f64,
}

/// Per-criterion arithmetic means over expert rows (criterion order fixed).
pub fn mean_profile(
    rendering_id: impl Into<String>,
    rows: &[[u8; 8]],
) -> Result<LikertProfile, EffectError> {
    if rows.is_empty() {
        return Err(EffectError::EmptyMatrix);
    }
    for row in rows {
        for &score in row {
            if !(1..=5).contains(&score) {
                return Err(ModelError::RatingOutOfRange(score as i64).into());
            }
        }
    }
    let mut means = [0.0f64; 8];
    for row in rows {
        for (m, &score) in means.iter_mut().zip(row) {
            *m += score as f64;
        }
    }
    for m in means.iter_mut() {
        *m /= rows.len() as f64;
    }
    Ok(LikertProfile::new(rendering_id, means.to_vec())?)
}

/// Sum of cyclically adjacent products Σ rᵢ·r₍ᵢ₊₁₎ — the shape-dependent
/// factor of the polygon area.
fn adjacent_product_sum(means: &[f64; 8]) -> f64 {
    (0..8).map(|i| means[i] * means[(i + 1) % 8]).sum()
}

/// Area of the radar polygon with radii `means` on 8 equally spaced axes:
/// ½·sin(2π/8)·Σ rᵢ·r₍ᵢ₊₁₎ (cyclic).
pub fn polygon_area_of(means: &[f64; 8]) -> f64 {
    0.5 * (2.0 * PI / 8.0).sin() * adjacent_product_sum(means)
}

/// Radar-polygon area of a validated profile.
pub fn polygon_area(profile: &LikertProfile) -> f64 {
    let means: [f64; 8] = profile.means().try_into().expect("profiles hold 8 means");
    polygon_area_of(&means)
}

/// Scores a profile against the all-5 maximum polygon. The percentage is
/// computed as 100·S/200 (S = adjacent-product sum): the ½·sin(2π/8) factor
/// cancels exactly, so integer profiles give exact percentages.
pub fn effectiveness(profile: &LikertProfile) -> EffectivenessResult {
    let means: [f64; 8] = profile.means().try_into().expect("profiles hold 8 means");
    let area = polygon_area_of(&means);
    let max_area = polygon_area_of(&[5.0; 8]);
    EffectivenessResult {
        rendering_id: profile.rendering_id.clone(),
        area,
        max_area,
        effectiveness: 100.0 * adjacent_product_sum(&means) / 200.0,
    }
}

/// Renders the profile as a static spider-chart SVG with gridline rings,
/// labelled axes, and the filled data polygon.
pub fn spider_svg(profile: &LikertProfile) -> String {
    let cx = 260.0;
    let cy = 220.0;
    let radius = 150.0;
    let angle = |i: usize| -PI / 2.0 + 2.0 * PI * i as f64 / 8.0;
    let point = |i: usize, value: f64| {
        let r = radius * value / 5.0;
        (cx + r * angle(i).cos(), cy + r * angle(i).sin())
    };
    let polygon = |value_of: &dyn Fn(usize) -> f64| {
        (0..8)
            .map(|i| {
                let (x, y) = point(i, value_of(i));
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"470\" \
         viewBox=\"0 0 520 470\">\n<title>{}</title>\n",
        profile.rendering_id
    ));
    svg.push_str("<rect width=\"520\" height=\"470\" fill=\"white\"/>\n");
    for ring in 1..=5 {
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
            polygon(&|_| ring as f64)
        ));
    }
    for i in 0..8 {
        let (x, y) = point(i, 5.0);
        svg.push_str(&format!(
            "<line x1=\"{cx:.2}\" y1=\"{cy:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" \
             stroke=\"#999999\" stroke-width=\"1\"/>\n"
        ));
        let (lx, ly) = point(i, 5.9);
        let anchor = if (lx - cx).abs() < 1.0 {
            "middle"
        } else if lx > cx {
            "start"
        } else {
            "end"
        };
        svg.push_str(&format!(
            "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"11\" \
             font-family=\"sans-serif\" text-anchor=\"{anchor}\">{}</text>\n",
            LIKERT_CRITERIA[i]
        ));
    }
    let means = profile.means();
    svg.push_str(&format!(
        "<polygon points=\"{}\" fill=\"#4477aa\" fill-opacity=\"0.45\" \
         stroke=\"#114488\" stroke-width=\"2\"/>\n",
        polygon(&|i| means[i])
    ));
    let score = effectiveness(profile);
    svg.push_str(&format!(
        "<text x=\"260.00\" y=\"455.00\" font-size=\"14\" font-family=\"sans-serif\" \
         text-anchor=\"middle\">{} — effectiveness {:.2}%</text>\n</svg>\n",
        profile.rendering_id, score.effectiveness
    ));
    svg
}
