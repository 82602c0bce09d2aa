//! Append-only feedback memory with replayable persistence.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::pipeline::PipelineError;

/// One recorded feedback event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub run_id: String,
    pub rendering_id: String,
    pub comment: String,
    /// Caller-supplied timestamp string; the store itself never reads clocks,
    /// so replays are exact.
    pub timestamp: String,
}

/// Append-only log of feedback entries, optionally backed by a JSON-lines
/// file. Reopening the file replays the identical state.
#[derive(Debug, Default)]
pub struct MemoryStore {
    path: Option<PathBuf>,
    entries: Vec<MemoryEntry>,
}

impl MemoryStore {
    /// A store with no backing file.
    pub fn in_memory() -> Self {
        MemoryStore::default()
    }

    /// Opens (or creates) a file-backed store, replaying existing lines.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let path = path.into();
        let mut entries = Vec::new();
        if path.exists() {
            let file = File::open(&path).map_err(|e| PipelineError::Io(e.to_string()))?;
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| PipelineError::Io(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry = serde_json::from_str(&line).map_err(|e| {
                    PipelineError::MemoryCorrupt {
                        line: i + 1,
                        message: e.to_string(),
                    }
                })?;
                entries.push(entry);
            }
        }
        Ok(MemoryStore {
            path: Some(path),
            entries,
        })
    }

    /// Appends one entry, writing it through to the backing file if any.
    pub fn append(&mut self, entry: MemoryEntry) -> Result<(), PipelineError> {
        if let Some(path) = &self.path {
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| PipelineError::Io(e.to_string()))?;
            let mut line = serde_json::to_string(&entry).expect("entries serialize");
            line.push('\n');
            file.write_all(line.as_bytes())
                .map_err(|e| PipelineError::Io(e.to_string()))?;
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[MemoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries recorded for one run, in append order.
    pub fn for_run<'a>(&'a self, run_id: &str) -> Vec<&'a MemoryEntry> {
        self.entries.iter().filter(|e| e.run_id == run_id).collect()
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }
}
