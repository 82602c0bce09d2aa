//! Perception stage: gaze-threshold ROI detection, collage composition,
//! edge extraction, dominant-colour palettes, and colour naming.

mod collage;
mod detect;
mod edges;
mod names;
mod palette;

pub use collage::compose_collage;
pub use detect::{crop, detect_rois, dwell_grid, Rect, Roi, RoiCell, RoiThreshold};
pub use edges::{extract_edges, gradient_magnitude};
pub use names::{name_colour, name_colours, parse_hex, rgb_to_lab, web_colour_table};
pub use palette::{extract_palette, Palette, Swatch};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RoiError {
    #[error("ROI threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("collage needs at least one crop")]
    EmptyCrops,
    #[error("hysteresis thresholds inverted: low {low} > high {high}")]
    BadHysteresis { low: f64, high: f64 },
    #[error("palette needs at least one swatch")]
    ZeroSwatches,
    #[error("image has no pixels")]
    EmptyImage,
    #[error("`{0}` is not a #RRGGBB colour")]
    BadHex(String),
}
