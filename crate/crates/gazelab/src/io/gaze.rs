//! Line-delimited gaze logs: one JSON record per line.
//!
//! The line-per-record layout allows streaming ingestion of long sessions;
//! blank lines are skipped so logs can be concatenated freely.

use crate::io::{utf8, IoError};
use crate::model::GazeEvent;

/// Parses a gaze log. Events come back in file order; every error names the
/// 1-based line it came from.
pub fn parse_gaze_log(bytes: &[u8]) -> Result<Vec<GazeEvent>, IoError> {
    let text = utf8(bytes)?;
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = (i + 1) as u64;
        if raw.trim().is_empty() {
            continue;
        }
        let event: GazeEvent = serde_json::from_str(raw).map_err(|e| IoError::Malformed {
            line,
            message: e.to_string(),
        })?;
        event
            .check()
            .map_err(|source| IoError::Invalid { line, source })?;
        events.push(event);
    }
    Ok(events)
}

/// Serializes events one JSON object per line, fields in declaration order.
pub fn write_gaze_log(events: &[GazeEvent]) -> Vec<u8> {
    let mut out = Vec::new();
    for event in events {
        // GazeEvent serializes infallibly: plain strings and finite floats.
        serde_json::to_writer(&mut out, event).expect("gaze event serializes");
        out.push(b'\n');
    }
    out
}
