//! Classical edge extraction: Sobel gradients, non-maximum suppression, and
//! hysteresis thresholding. Fills the edge-map contract with a deterministic,
//! download-free detector; an external backend can be bound at the pipeline
//! level instead.

use image::GrayImage;

use crate::analytics::HeatGrid;
use crate::roi::RoiError;

/// 3×3 Sobel gradient magnitude with replicated borders. Values range up to
/// 4·255·√2 ≈ 1442 on 8-bit input.
pub fn gradient_magnitude(image: &GrayImage) -> HeatGrid {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let at = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, w - 1) as u32;
        let y = y.clamp(0, h - 1) as u32;
        image.get_pixel(x, y)[0] as f64
    };
    let mut grid = HeatGrid::zeros(w as usize, h as usize);
    for y in 0..h {
        for x in 0..w {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            grid.add(x as usize, y as usize, gx.hypot(gy));
        }
    }
    grid
}

/// Gradient direction folded to [0, π), quantized to the four NMS sectors:
/// 0 = horizontal gradient (vertical edge), 1 = 45°, 2 = vertical, 3 = 135°.
fn sector(gx: f64, gy: f64) -> usize {
    let mut angle = gy.atan2(gx);
    if angle < 0.0 {
        angle += std::f64::consts::PI;
    }
    let eighth = std::f64::consts::PI / 8.0;
    if angle < eighth || angle >= 7.0 * eighth {
        0
    } else if angle < 3.0 * eighth {
        1
    } else if angle < 5.0 * eighth {
        2
    } else {
        3
    }
}

/// Binary edge map (0 / 255): Sobel magnitude, one-pixel-thinning NMS, then
/// hysteresis keeping weak edges (≥ `low`) only when 8-connected to a strong
/// edge (≥ `high`).
pub fn extract_edges(image: &GrayImage, low: f64, high: f64) -> Result<GrayImage, RoiError> {
    if low > high {
        return Err(RoiError::BadHysteresis { low, high });
    }
    let (w, h) = (image.width() as usize, image.height() as usize);
    if w == 0 || h == 0 {
        return Err(RoiError::EmptyImage);
    }
    let wi = w as i64;
    let hi = h as i64;
    let at = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, wi - 1) as u32;
        let y = y.clamp(0, hi - 1) as u32;
        image.get_pixel(x, y)[0] as f64
    };

    // Gradients (kept separate from gradient_magnitude: NMS needs direction).
    let mut mag = vec![0.0f64; w * h];
    let mut dir = vec![0usize; w * h];
    for y in 0..hi {
        for x in 0..wi {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            let i = (y * wi + x) as usize;
            mag[i] = gx.hypot(gy);
            dir[i] = sector(gx, gy);
        }
    }

    // NMS along the gradient. Plateaus are broken asymmetrically (strict
    // against the earlier neighbour in scan order, non-strict against the
    // later one) so a two-pixel-wide response thins to one pixel.
    let mag_at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= wi || y >= hi {
            0.0
        } else {
            mag[(y * wi + x) as usize]
        }
    };
    let mut thin = vec![0.0f64; w * h];
    for y in 0..hi {
        for x in 0..wi {
            let i = (y * wi + x) as usize;
            if mag[i] == 0.0 {
                continue;
            }
            // (earlier neighbour, later neighbour) along the gradient.
            let (before, after) = match dir[i] {
                0 => (mag_at(x - 1, y), mag_at(x + 1, y)),
                1 => (mag_at(x - 1, y - 1), mag_at(x + 1, y + 1)),
                2 => (mag_at(x, y - 1), mag_at(x, y + 1)),
                _ => (mag_at(x + 1, y - 1), mag_at(x - 1, y + 1)),
            };
            if mag[i] > before && mag[i] >= after {
                thin[i] = mag[i];
            }
        }
    }

    // Hysteresis: flood from strong pixels through weak ones, 8-connected.
    let mut keep = vec![false; w * h];
    let mut stack = Vec::new();
    for i in 0..w * h {
        if thin[i] >= high && !keep[i] {
            keep[i] = true;
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (jx, jy) = ((j % w) as i64, (j / w) as i64);
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        let (nx, ny) = (jx + dx, jy + dy);
                        if nx < 0 || ny < 0 || nx >= wi || ny >= hi {
                            continue;
                        }
                        let n = (ny * wi + nx) as usize;
                        if !keep[n] && thin[n] >= low {
                            keep[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
        }
    }

    let mut out = GrayImage::new(w as u32, h as u32);
    for (i, kept) in keep.iter().enumerate() {
        if *kept {
            out.put_pixel((i % w) as u32, (i / w) as u32, image::Luma([255]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Luma;

    fn gray(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> GrayImage {
        GrayImage::from_fn(width, height, |x, y| Luma([f(x, y)]))
    }

    #[test]
    fn constant_image_has_no_edges() {
        let img = gray(16, 16, |_, _| 120);
        let edges = extract_edges(&img, 40.0, 100.0).unwrap();
        assert!(edges.pixels().all(|p| p[0] == 0));
    }

    #[test]
    fn vertical_step_gives_single_pixel_line() {
        // Step between x = 7 and x = 8; Sobel responds equally at both
        // columns (4·Δ = 600) and NMS must keep exactly one.
        let img = gray(16, 16, |x, _| if x < 8 { 50 } else { 200 });
        let edges = extract_edges(&img, 100.0, 300.0).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                let expect = if x == 7 { 255 } else { 0 };
                assert_eq!(edges.get_pixel(x, y)[0], expect, "pixel ({x}, {y})");
            }
        }
    }

    #[test]
    fn sobel_matches_direct_convolution() {
        let img = gray(12, 9, |x, y| ((x * 31 + y * 57) % 251) as u8);
        let grid = gradient_magnitude(&img);
        let clamp_get = |x: i64, y: i64| -> f64 {
            let x = x.clamp(0, 11) as u32;
            let y = y.clamp(0, 8) as u32;
            img.get_pixel(x, y)[0] as f64
        };
        const KX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
        const KY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
        for y in 0..9i64 {
            for x in 0..12i64 {
                let mut gx = 0.0;
                let mut gy = 0.0;
                for (ky, row) in KX.iter().enumerate() {
                    for (kx, _) in row.iter().enumerate() {
                        let v = clamp_get(x + kx as i64 - 1, y + ky as i64 - 1);
                        gx += KX[ky][kx] * v;
                        gy += KY[ky][kx] * v;
                    }
                }
                let want = (gx * gx + gy * gy).sqrt();
                let got = grid.get(x as usize, y as usize);
                assert!((got - want).abs() < 1e-9, "({x}, {y}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn checkerboard_edges_sit_on_square_boundaries() {
        // 8×8 squares: every edge pixel must be within 1 px of a boundary,
        // and square interiors must stay clean.
        let img = gray(64, 64, |x, y| {
            if ((x / 8) + (y / 8)) % 2 == 0 {
                230
            } else {
                25
            }
        });
        let edges = extract_edges(&img, 100.0, 400.0).unwrap();
        let near_boundary = |v: u32| {
            let m = v % 8;
            m == 0 || m == 7
        };
        let mut edge_count = 0;
        for y in 0..64 {
            for x in 0..64 {
                if edges.get_pixel(x, y)[0] == 255 {
                    edge_count += 1;
                    assert!(
                        near_boundary(x) || near_boundary(y),
                        "interior edge at ({x}, {y})"
                    );
                }
            }
        }
        assert!(edge_count > 50, "checkerboard should produce many edges");
    }

    #[test]
    fn invariant_under_intensity_offset() {
        let img = gray(20, 20, |x, y| ((x * 13 + y * 7) % 100) as u8);
        let shifted = gray(20, 20, |x, y| ((x * 13 + y * 7) % 100) as u8 + 100);
        let a = extract_edges(&img, 30.0, 80.0).unwrap();
        let b = extract_edges(&shifted, 30.0, 80.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inverted_thresholds_rejected() {
        let img = gray(4, 4, |_, _| 0);
        assert_eq!(
            extract_edges(&img, 100.0, 50.0).unwrap_err(),
            RoiError::BadHysteresis {
                low: 100.0,
                high: 50.0
            }
        );
    }

    #[test]
    fn weak_edges_survive_only_near_strong_ones() {
        // A strong step on the left half, a faint one on the right.
        let img = gray(32, 16, |x, _| match x {
            0..=7 => 0,
            8..=23 => 160,
            _ => 190,
        });
        let edges = extract_edges(&img, 80.0, 500.0).unwrap();
        let strong_col: u32 = 7;
        let faint_col: u32 = 23;
        assert_eq!(edges.get_pixel(strong_col, 8)[0], 255);
        // The faint step's magnitude (4·30 = 120) passes `low` but has no
        // strong seed anywhere nearby, so hysteresis drops it.
        assert_eq!(edges.get_pixel(faint_col, 8)[0], 0);
    }
}
