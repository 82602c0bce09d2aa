//! Gaze heatmaps: duration-weighted Gaussian splats on a fixed grid.

use serde::{Deserialize, Serialize};

use crate::analytics::AnalyticsError;
use crate::io::IoError;

/// A row-major grid of non-negative densities (or dwell seconds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatGrid {
    pub width: usize,
    pub height: usize,
    data: Vec<f64>,
}

impl HeatGrid {
    pub fn zeros(width: usize, height: usize) -> Self {
        HeatGrid {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "grid data length");
        HeatGrid {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn add(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] += value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }

    /// Cell with the largest value (first such cell in row-major order).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.data.iter().enumerate() {
            if *v > self.data[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Plain-text portable graymap (P2), linearly scaled so the hottest cell
    /// maps to 255. An all-zero grid stays all zero.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        let max = self.max();
        for y in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|x| {
                    let v = if max > 0.0 {
                        (self.get(x, y) / max * 255.0).round() as u32
                    } else {
                        0
                    };
                    v.to_string()
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Full-precision CSV rows (shortest float form that round-trips).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for y in 0..self.height {
            let row: Vec<String> = (0..self.width).map(|x| self.get(x, y).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV layout written by [`HeatGrid::to_csv`].
    pub fn parse_csv(text: &str) -> Result<Self, IoError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = (i + 1) as u64;
            if raw.trim().is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for cell in raw.split(',') {
                let value: f64 = cell.trim().parse().map_err(|_| IoError::Malformed {
                    line,
                    message: format!("`{cell}` is not a number"),
                })?;
                row.push(value);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(IoError::Malformed {
                        line,
                        message: format!("row has {} cells, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(IoError::Malformed {
                line: 1,
                message: "empty grid".to_string(),
            });
        }
        let width = rows[0].len();
        let height = rows.len();
        Ok(HeatGrid {
            width,
            height,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

/// Renders gaze points into a density grid. Each `(u, v, duration)` point
/// splats an isotropic Gaussian with σ = `bandwidth` × the grid diagonal,
/// truncated to the cells whose centres lie within 4σ (clipped to the grid)
/// and renormalized there, so each point contributes exactly its duration and
/// the grid total equals total dwell. The centre-distance cutoff keeps the
/// support symmetric: mirrored points produce mirrored splats.
pub fn image_heatmap(
    points: &[(f64, f64, f64)],
    resolution: (usize, usize),
    bandwidth: f64,
) -> Result<HeatGrid, AnalyticsError> {
    let (width, height) = resolution;
    if width == 0 || height == 0 {
        return Err(AnalyticsError::ZeroResolution);
    }
    if !(bandwidth > 0.0) {
        return Err(AnalyticsError::NonPositiveBandwidth(bandwidth));
    }
    let sigma = bandwidth * ((width * width + height * height) as f64).sqrt();
    let mut grid = HeatGrid::zeros(width, height);
    let mut weights = Vec::new();
    for &(u, v, duration) in points {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(AnalyticsError::PointOutOfRange { u, v });
        }
        if !(duration > 0.0) {
            return Err(AnalyticsError::NonPositiveDuration(duration));
        }
        let px = u * width as f64;
        let py = v * height as f64;
        // Cell x is in the support iff its centre x + 0.5 is within 4σ of px.
        let x0 = ((px - 4.0 * sigma - 0.5).ceil().max(0.0)) as usize;
        let x1 = ((px + 4.0 * sigma - 0.5).floor().max(0.0) as usize).min(width - 1);
        let y0 = ((py - 4.0 * sigma - 0.5).ceil().max(0.0)) as usize;
        let y1 = ((py + 4.0 * sigma - 0.5).floor().max(0.0) as usize).min(height - 1);
        weights.clear();
        let mut sum = 0.0;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = (x as f64 + 0.5) - px;
                let dy = (y as f64 + 0.5) - py;
                let w = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                weights.push(w);
                sum += w;
            }
        }
        if sum > 0.0 {
            let mut k = 0;
            for y in y0..=y1 {
                for x in x0..=x1 {
                    grid.add(x, y, duration * weights[k] / sum);
                    k += 1;
                }
            }
        } else {
            // Degenerate bandwidth: the whole mass lands in the nearest cell.
            let x = (px as usize).min(width - 1);
            let y = (py as usize).min(height - 1);
            grid.add(x, y, duration);
        }
    }
    Ok(grid)
}
