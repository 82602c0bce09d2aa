//! Dwell aggregation: merging raw gaze episodes into per-image fixation
//! records, and splitting session time into fixation vs. browse time.

use std::collections::BTreeMap;

use crate::analytics::AnalyticsError;
use crate::model::{DwellRecord, ValidatedSession};

/// Episode-merging parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellConfig {
    /// Same-image episodes separated by strictly less than this merge into
    /// one. Gap time itself is never counted as dwell.
    pub gap_tolerance: f64,
    /// Merged episodes shorter than this are glances, not fixations, and are
    /// dropped. Set to 0 to keep everything.
    pub min_episode: f64,
}

impl Default for DwellConfig {
    /// 0.1 s gap tolerance (typical blink/saccade), 0.2 s fixation floor.
    fn default() -> Self {
        DwellConfig {
            gap_tolerance: 0.1,
            min_episode: 0.2,
        }
    }
}

/// Merges a session's gaze episodes into one dwell record per image.
///
/// Records come back sorted by image id; images whose counted dwell is zero
/// are omitted.
pub fn aggregate_dwell(session: &ValidatedSession, config: &DwellConfig) -> Vec<DwellRecord> {
    // Group the (already time-sorted) events per image, preserving order.
    let mut per_image: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for event in session.events() {
        per_image
            .entry(event.image_id.as_str())
            .or_default()
            .push((event.t_start, event.t_end));
    }

    let mut records = Vec::new();
    for (image_id, episodes) in per_image {
        // Merge runs of episodes whose gap is < tolerance. A merged episode's
        // dwell is the sum of its raw durations, so gaps never add time.
        let mut merged: Vec<(f64, f64, f64)> = Vec::new(); // (start, end, dwell)
        for &(start, end) in &episodes {
            match merged.last_mut() {
                Some(last) if start - last.1 < config.gap_tolerance => {
                    last.1 = end;
                    last.2 += end - start;
                }
                _ => merged.push((start, end, end - start)),
            }
        }
        let counted: Vec<&(f64, f64, f64)> = merged
            .iter()
            .filter(|m| m.2 >= config.min_episode)
            .collect();
        let total_dwell: f64 = counted.iter().map(|m| m.2).sum();
        if total_dwell > 0.0 {
            records.push(DwellRecord {
                image_id: image_id.to_string(),
                total_dwell,
                episode_count: counted.len(),
                first_visit: counted[0].0,
            });
        }
    }
    records
}

/// Splits a session of `session_length` seconds into (fixation, browse) time.
/// Fixation time is the summed dwell; browse time is the remainder.
pub fn session_time_split(
    records: &[DwellRecord],
    session_length: f64,
) -> Result<(f64, f64), AnalyticsError> {
    let fixation: f64 = records.iter().map(|r| r.total_dwell).sum();
    let browse = session_length - fixation;
    if browse < 0.0 {
        return Err(AnalyticsError::InconsistentSessionLength {
            dwell: fixation,
            session_length,
        });
    }
    Ok((fixation, browse))
}
