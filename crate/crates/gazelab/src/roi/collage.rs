//! ROI collage composition: packing attended crops into one summary image.

use image::{imageops, RgbImage};

use crate::roi::RoiError;

/// Packs crops into a near-square canvas. Crops are scaled to a common row
/// height (the median crop height) and placed row-major in input order, which
/// callers should make descending-dwell order. The function is pure: the same
/// crops give byte-identical output.
pub fn compose_collage(crops: &[RgbImage]) -> Result<RgbImage, RoiError> {
    if crops.is_empty() {
        return Err(RoiError::EmptyCrops);
    }
    if crops.iter().any(|c| c.width() == 0 || c.height() == 0) {
        return Err(RoiError::EmptyImage);
    }

    // Common row height: the (lower) median of the crop heights.
    let mut heights: Vec<u32> = crops.iter().map(|c| c.height()).collect();
    heights.sort_unstable();
    let row_height = heights[(heights.len() - 1) / 2];

    let scaled: Vec<RgbImage> = crops
        .iter()
        .map(|c| {
            if c.height() == row_height {
                c.clone()
            } else {
                let w = ((c.width() as f64 * row_height as f64 / c.height() as f64).round()
                    as u32)
                    .max(1);
                imageops::resize(c, w, row_height, imageops::FilterType::Triangle)
            }
        })
        .collect();

    // Near-square target: r rows of height `row_height` each holding about
    // total_width / r, so r ≈ sqrt(total_width / row_height).
    let total_width: u32 = scaled.iter().map(|c| c.width()).sum();
    let rows = ((total_width as f64 / row_height as f64).sqrt().round() as u32).max(1);
    let target_width = total_width.div_ceil(rows);

    // Greedy row-major fill.
    let mut placements: Vec<(u32, u32, usize)> = Vec::new(); // (x, y, crop index)
    let mut x = 0;
    let mut y = 0;
    let mut canvas_width = 0;
    for (i, c) in scaled.iter().enumerate() {
        if x > 0 && x + c.width() > target_width {
            x = 0;
            y += row_height;
        }
        placements.push((x, y, i));
        x += c.width();
        canvas_width = canvas_width.max(x);
    }
    let canvas_height = y + row_height;

    let mut canvas = RgbImage::new(canvas_width, canvas_height);
    for (x, y, i) in placements {
        imageops::replace(&mut canvas, &scaled[i], x as i64, y as i64);
    }
    Ok(canvas)
}
