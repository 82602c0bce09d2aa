//! Dominant-colour extraction by median-cut quantization in RGB.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::roi::{name_colour, web_colour_table, RoiError};

/// One palette entry: colour, share of pixels, and a descriptive name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swatch {
    pub hex: String,
    pub weight: f64,
    pub name: String,
}

/// Dominant-first colour palette. Weights sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub swatches: Vec<Swatch>,
    /// Set when fewer swatches than requested exist (k exceeded the number
    /// of distinct colours).
    pub note: Option<String>,
}

impl Palette {
    /// Parallel list of swatch names, dominant first.
    pub fn names(&self) -> Vec<&str> {
        self.swatches.iter().map(|s| s.name.as_str()).collect()
    }

    /// `(hex, name)` pairs for the feature-map bundle.
    pub fn hex_name_pairs(&self) -> Vec<(String, String)> {
        self.swatches
            .iter()
            .map(|s| (s.hex.clone(), s.name.clone()))
            .collect()
    }
}

/// A contiguous slice of the sorted working buffer.
struct ColourBox {
    start: usize,
    len: usize,
}

impl ColourBox {
    /// (channel with the widest range, that range).
    fn widest_channel(&self, pixels: &[[u8; 3]]) -> (usize, u8) {
        let slice = &pixels[self.start..self.start + self.len];
        let mut best = (0, 0);
        for channel in 0..3 {
            let min = slice.iter().map(|p| p[channel]).min().unwrap();
            let max = slice.iter().map(|p| p[channel]).max().unwrap();
            let range = max - min;
            if range > best.1 {
                best = (channel, range);
            }
        }
        best
    }
}

/// Quantizes the image's pixels into `k` boxes with median cut; each swatch
/// is its box's mean colour and weight is the box's pixel share. If the image
/// has fewer than `k` distinct colours, the palette holds one swatch per
/// distinct colour plus a note saying so.
pub fn extract_palette(image: &RgbImage, k: usize) -> Result<Palette, RoiError> {
    if k == 0 {
        return Err(RoiError::ZeroSwatches);
    }
    if image.width() == 0 || image.height() == 0 {
        return Err(RoiError::EmptyImage);
    }
    // Work over the sorted pixel multiset, so pixel order cannot matter.
    let mut pixels: Vec<[u8; 3]> = image.pixels().map(|p| p.0).collect();
    pixels.sort_unstable();
    let total = pixels.len();

    let mut boxes = vec![ColourBox {
        start: 0,
        len: total,
    }];
    while boxes.len() < k {
        // Split the box with the widest channel range; ties go to the box
        // created first. Boxes with zero range are single-colour and final.
        let candidate = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.widest_channel(&pixels)))
            .filter(|(_, (_, range))| *range > 0)
            .max_by_key(|(i, (_, range))| (*range, std::cmp::Reverse(*i)));
        let Some((index, (channel, _))) = candidate else {
            break; // every box is a single colour
        };
        let b = &boxes[index];
        let slice = &mut pixels[b.start..b.start + b.len];
        slice.sort_unstable_by_key(|p| (p[channel], *p));
        // Split at the value boundary nearest the median pixel, so runs of
        // one exact colour never straddle two boxes.
        let half = b.len / 2;
        let mut split = 0;
        let mut best_dist = usize::MAX;
        for i in 1..b.len {
            if slice[i][channel] != slice[i - 1][channel] {
                let dist = half.abs_diff(i);
                if dist < best_dist {
                    best_dist = dist;
                    split = i;
                }
            }
        }
        let (start, len) = (b.start, b.len);
        boxes[index] = ColourBox { start, len: split };
        boxes.push(ColourBox {
            start: start + split,
            len: len - split,
        });
    }

    let table = web_colour_table();
    let mut swatches: Vec<Swatch> = boxes
        .iter()
        .map(|b| {
            let slice = &pixels[b.start..b.start + b.len];
            let mut sums = [0u64; 3];
            for p in slice {
                for c in 0..3 {
                    sums[c] += p[c] as u64;
                }
            }
            let mean: Vec<u8> = sums
                .iter()
                .map(|s| (*s as f64 / b.len as f64).round() as u8)
                .collect();
            let rgb = [mean[0], mean[1], mean[2]];
            Swatch {
                hex: format!("#{:02X}{:02X}{:02X}", rgb[0], rgb[1], rgb[2]),
                weight: b.len as f64 / total as f64,
                name: name_colour(rgb, table).to_string(),
            }
        })
        .collect();
    swatches.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.hex.cmp(&b.hex)));

    let note = (swatches.len() < k).then(|| {
        format!(
            "image has only {} distinct colour groups; {k} swatches requested",
            swatches.len()
        )
    });
    Ok(Palette { swatches, note })
}
