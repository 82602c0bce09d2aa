//! Gaze-threshold ROI detection on per-image dwell grids.

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::analytics::HeatGrid;
use crate::roi::RoiError;

/// Pixel rectangle within an image (x, y at the top-left corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

/// One above-threshold grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiCell {
    /// (row, col) in the dwell grid.
    pub cell: (usize, usize),
    pub dwell: f64,
    pub rect: Rect,
}

/// A 4-connected group of above-threshold cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roi {
    pub cells: Vec<RoiCell>,
    /// Bounding box of the member cells.
    pub rect: Rect,
    /// Summed dwell of the member cells.
    pub dwell: f64,
}

/// How the selection threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoiThreshold {
    /// A fixed dwell in seconds; must be positive.
    Absolute(f64),
    /// max(0.25 s, 5% of the image's total dwell) — a floor that adapts to
    /// how long the image was studied overall.
    Auto,
}

impl RoiThreshold {
    fn resolve(self, total_dwell: f64) -> Result<f64, RoiError> {
        match self {
            RoiThreshold::Absolute(t) if t > 0.0 => Ok(t),
            RoiThreshold::Absolute(t) => Err(RoiError::NonPositiveThreshold(t)),
            RoiThreshold::Auto => Ok(f64::max(0.25, 0.05 * total_dwell)),
        }
    }
}

/// Histogram of episode durations over a rows×cols grid of one image's unit
/// square. The default ROI grid is 10×10.
pub fn dwell_grid(points: &[(f64, f64, f64)], rows: usize, cols: usize) -> HeatGrid {
    let mut grid = HeatGrid::zeros(cols, rows);
    for &(u, v, duration) in points {
        let col = ((u * cols as f64) as usize).min(cols - 1);
        let row = ((v * rows as f64) as usize).min(rows - 1);
        grid.add(col, row, duration);
    }
    grid
}

fn cell_rect(row: usize, col: usize, grid: &HeatGrid, image_size: (u32, u32)) -> Rect {
    let (w, h) = (image_size.0 as usize, image_size.1 as usize);
    let x0 = col * w / grid.width;
    let x1 = (col + 1) * w / grid.width;
    let y0 = row * h / grid.height;
    let y1 = (row + 1) * h / grid.height;
    Rect {
        x: x0 as u32,
        y: y0 as u32,
        width: (x1 - x0) as u32,
        height: (y1 - y0) as u32,
    }
}

/// Selects grid cells whose dwell strictly exceeds the threshold and merges
/// 4-connected selections into ROIs (rect = bounding box). ROIs come back in
/// descending dwell order, ties broken by first cell in row-major order.
pub fn detect_rois(
    grid: &HeatGrid,
    image_size: (u32, u32),
    threshold: RoiThreshold,
) -> Result<Vec<Roi>, RoiError> {
    let cut = threshold.resolve(grid.total())?;
    let (cols, rows) = (grid.width, grid.height);
    let hot = |row: usize, col: usize| grid.get(col, row) > cut;

    let mut seen = vec![false; rows * cols];
    let mut rois = Vec::new();
    for start_row in 0..rows {
        for start_col in 0..cols {
            if !hot(start_row, start_col) || seen[start_row * cols + start_col] {
                continue;
            }
            // Flood-fill the 4-connected component containing this cell.
            let mut stack = vec![(start_row, start_col)];
            seen[start_row * cols + start_col] = true;
            let mut cells = Vec::new();
            while let Some((row, col)) = stack.pop() {
                cells.push((row, col));
                let mut neighbours = Vec::new();
                if row > 0 {
                    neighbours.push((row - 1, col));
                }
                if row + 1 < rows {
                    neighbours.push((row + 1, col));
                }
                if col > 0 {
                    neighbours.push((row, col - 1));
                }
                if col + 1 < cols {
                    neighbours.push((row, col + 1));
                }
                for (r, c) in neighbours {
                    if hot(r, c) && !seen[r * cols + c] {
                        seen[r * cols + c] = true;
                        stack.push((r, c));
                    }
                }
            }
            cells.sort_unstable();
            let member_cells: Vec<RoiCell> = cells
                .iter()
                .map(|&(row, col)| RoiCell {
                    cell: (row, col),
                    dwell: grid.get(col, row),
                    rect: cell_rect(row, col, grid, image_size),
                })
                .collect();
            let x0 = member_cells.iter().map(|c| c.rect.x).min().unwrap();
            let y0 = member_cells.iter().map(|c| c.rect.y).min().unwrap();
            let x1 = member_cells
                .iter()
                .map(|c| c.rect.x + c.rect.width)
                .max()
                .unwrap();
            let y1 = member_cells
                .iter()
                .map(|c| c.rect.y + c.rect.height)
                .max()
                .unwrap();
            let dwell = member_cells.iter().map(|c| c.dwell).sum();
            rois.push(Roi {
                cells: member_cells,
                rect: Rect {
                    x: x0,
                    y: y0,
                    width: x1 - x0,
                    height: y1 - y0,
                },
                dwell,
            });
        }
    }
    rois.sort_by(|a, b| {
        b.dwell
            .total_cmp(&a.dwell)
            .then_with(|| a.cells[0].cell.cmp(&b.cells[0].cell))
    });
    Ok(rois)
}

/// Crops a rectangle out of an image.
pub fn crop(image: &RgbImage, rect: &Rect) -> RgbImage {
    image::imageops::crop_imm(image, rect.x, rect.y, rect.width, rect.height).to_image()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_from(rows: usize, cols: usize, hot_cells: &[(usize, usize, f64)]) -> HeatGrid {
        let mut grid = HeatGrid::zeros(cols, rows);
        for &(row, col, dwell) in hot_cells {
            grid.add(col, row, dwell);
        }
        grid
    }

    #[test]
    fn all_zero_grid_has_no_rois() {
        let grid = HeatGrid::zeros(10, 10);
        let rois = detect_rois(&grid, (200, 100), RoiThreshold::Absolute(0.25)).unwrap();
        assert!(rois.is_empty());
    }

    #[test]
    fn single_hot_cell_is_its_own_rect() {
        let grid = grid_from(10, 10, &[(2, 3, 5.0)]);
        let rois = detect_rois(&grid, (200, 100), RoiThreshold::Absolute(0.25)).unwrap();
        assert_eq!(rois.len(), 1);
        assert_eq!(rois[0].cells.len(), 1);
        let rect = Rect {
            x: 60,
            y: 20,
            width: 20,
            height: 10,
        };
        assert_eq!(rois[0].rect, rect);
        assert_eq!(rois[0].cells[0].rect, rect);
    }

    #[test]
    fn adjacency_merges_diagonals_do_not() {
        let adjacent = grid_from(10, 10, &[(4, 4, 1.0), (4, 5, 1.0)]);
        let rois = detect_rois(&adjacent, (100, 100), RoiThreshold::Absolute(0.5)).unwrap();
        assert_eq!(rois.len(), 1);
        assert_eq!(rois[0].cells.len(), 2);

        let diagonal = grid_from(10, 10, &[(4, 4, 1.0), (5, 5, 1.0)]);
        let rois = detect_rois(&diagonal, (100, 100), RoiThreshold::Absolute(0.5)).unwrap();
        assert_eq!(rois.len(), 2);
    }

    #[test]
    fn auto_threshold_floors_at_quarter_second() {
        // Total dwell 2 s: 5% is 0.1 s, so the 0.25 s floor applies and the
        // 0.2 s cell stays unselected.
        let grid = grid_from(10, 10, &[(0, 0, 1.8), (9, 9, 0.2)]);
        let rois = detect_rois(&grid, (100, 100), RoiThreshold::Auto).unwrap();
        assert_eq!(rois.len(), 1);
        assert_eq!(rois[0].cells[0].cell, (0, 0));

        // Total dwell 100 s: 5% is 5 s, which now beats the floor.
        let grid = grid_from(10, 10, &[(0, 0, 96.0), (9, 9, 4.0)]);
        let rois = detect_rois(&grid, (100, 100), RoiThreshold::Auto).unwrap();
        assert_eq!(rois.len(), 1);
    }

    #[test]
    fn non_positive_threshold_rejected() {
        let grid = HeatGrid::zeros(10, 10);
        assert_eq!(
            detect_rois(&grid, (100, 100), RoiThreshold::Absolute(0.0)).unwrap_err(),
            RoiError::NonPositiveThreshold(0.0)
        );
    }

    #[test]
    fn rois_sorted_by_descending_dwell() {
        let grid = grid_from(10, 10, &[(0, 0, 1.0), (5, 5, 3.0)]);
        let rois = detect_rois(&grid, (100, 100), RoiThreshold::Absolute(0.5)).unwrap();
        assert_eq!(rois[0].cells[0].cell, (5, 5));
        assert_eq!(rois[1].cells[0].cell, (0, 0));
    }

    #[test]
    fn dwell_grid_bins_points() {
        let grid = dwell_grid(&[(0.05, 0.05, 1.0), (0.07, 0.01, 0.5), (0.99, 0.99, 2.0)], 10, 10);
        assert_eq!(grid.get(0, 0), 1.5);
        assert_eq!(grid.get(9, 9), 2.0);
        // u = 1.0 clamps into the last column.
        let grid = dwell_grid(&[(1.0, 0.0, 1.0)], 10, 10);
        assert_eq!(grid.get(9, 0), 1.0);
    }

    /// Brute-force oracle: threshold, then grow components by repeated
    /// neighbour absorption until a fixed point.
    fn brute_force_components(grid: &HeatGrid, cut: f64) -> Vec<Vec<(usize, usize)>> {
        let (rows, cols) = (grid.height, grid.width);
        let mut label: Vec<Option<usize>> = vec![None; rows * cols];
        let mut next = 0;
        for row in 0..rows {
            for col in 0..cols {
                if grid.get(col, row) > cut {
                    label[row * cols + col] = Some(next);
                    next += 1;
                }
            }
        }
        // Relax labels to the minimum over 4-neighbours until stable.
        let mut changed = true;
        while changed {
            changed = false;
            for row in 0..rows {
                for col in 0..cols {
                    let Some(current) = label[row * cols + col] else { continue };
                    let mut best = current;
                    let mut consider = |r: i64, c: i64| {
                        if r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols {
                            if let Some(l) = label[r as usize * cols + c as usize] {
                                best = best.min(l);
                            }
                        }
                    };
                    consider(row as i64 - 1, col as i64);
                    consider(row as i64 + 1, col as i64);
                    consider(row as i64, col as i64 - 1);
                    consider(row as i64, col as i64 + 1);
                    if best < current {
                        label[row * cols + col] = Some(best);
                        changed = true;
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for row in 0..rows {
            for col in 0..cols {
                if let Some(l) = label[row * cols + col] {
                    groups.entry(l).or_default().push((row, col));
                }
            }
        }
        groups.into_values().collect()
    }

    proptest! {
        /// detect_rois partitions cells exactly like the brute-force oracle.
        #[test]
        fn matches_brute_force(
            values in prop::collection::vec(0.0f64..1.0, 100),
            cut in 0.1f64..0.9,
        ) {
            let grid = HeatGrid::from_data(10, 10, values);
            let rois = detect_rois(&grid, (100, 100), RoiThreshold::Absolute(cut)).unwrap();
            let mut got: Vec<Vec<(usize, usize)>> = rois
                .iter()
                .map(|r| r.cells.iter().map(|c| c.cell).collect())
                .collect();
            got.sort();
            let mut want = brute_force_components(&grid, cut);
            want.sort();
            prop_assert_eq!(got, want);
        }
    }
}
