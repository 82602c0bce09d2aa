//! On-disk formats: gaze logs, rating tables, ranking ballots, Likert tables,
//! and canonical analysis reports.
//!
//! All parsers are strict: a malformed row is never dropped silently, and
//! every error carries a 1-based line number. Formats are chosen by file
//! extension or an explicit flag, never sniffed from content.

mod gaze;
mod report;
mod tables;

pub use gaze::{parse_gaze_log, write_gaze_log};
pub use report::{write_report, Metric};
pub use tables::{
    parse_ballots, parse_likert, parse_ratings, write_ballots, write_likert, write_ratings,
    LikertRow,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: u64, source: ModelError },
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("{path}: cannot infer format from extension `{ext}`; pass an explicit format")]
    UnknownExtension { path: String, ext: String },
    #[error("unknown format name `{0}`")]
    UnknownFormatName(String),
    #[error("ballots must all rank the same number of candidates")]
    MixedBallotArity,
}

impl IoError {
    /// The 1-based line number the error refers to, when it refers to one.
    pub fn line(&self) -> Option<u64> {
        match self {
            IoError::Malformed { line, .. } | IoError::Invalid { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// The four on-disk formats the toolkit reads and writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionFormat {
    GazeJsonl,
    RatingsCsv,
    BallotsCsv,
    LikertCsv,
}

impl SessionFormat {
    /// Parses the format name used by `--format` flags.
    pub fn parse_flag(name: &str) -> Result<Self, IoError> {
        match name {
            "gaze-jsonl" => Ok(SessionFormat::GazeJsonl),
            "ratings-csv" => Ok(SessionFormat::RatingsCsv),
            "ballots-csv" => Ok(SessionFormat::BallotsCsv),
            "likert-csv" => Ok(SessionFormat::LikertCsv),
            other => Err(IoError::UnknownFormatName(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SessionFormat::GazeJsonl => "gaze-jsonl",
            SessionFormat::RatingsCsv => "ratings-csv",
            SessionFormat::BallotsCsv => "ballots-csv",
            SessionFormat::LikertCsv => "likert-csv",
        }
    }

    /// The file extension this format expects.
    pub fn extension(self) -> &'static str {
        match self {
            SessionFormat::GazeJsonl => "jsonl",
            SessionFormat::RatingsCsv | SessionFormat::BallotsCsv | SessionFormat::LikertCsv => {
                "csv"
            }
        }
    }

    fn matches_extension(self, ext: &str) -> bool {
        ext.eq_ignore_ascii_case(self.extension())
    }
}

/// A path plus its resolved format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionFile {
    pub path: PathBuf,
    pub format: SessionFormat,
}

impl SessionFile {
    /// Resolves the format of `path`. An `explicit` format always wins;
    /// otherwise the extension must match what the caller `expected`
    /// (the three CSV formats share the `.csv` extension, so the expected
    /// format disambiguates them).
    pub fn resolve(
        path: impl Into<PathBuf>,
        expected: SessionFormat,
        explicit: Option<SessionFormat>,
    ) -> Result<Self, IoError> {
        let path = path.into();
        if let Some(format) = explicit {
            return Ok(SessionFile { path, format });
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_string();
        if expected.matches_extension(&ext) {
            Ok(SessionFile {
                path,
                format: expected,
            })
        } else {
            Err(IoError::UnknownExtension {
                path: path.display().to_string(),
                ext,
            })
        }
    }
}

pub(crate) fn utf8(bytes: &[u8]) -> Result<&str, IoError> {
    std::str::from_utf8(bytes).map_err(|_| IoError::NotUtf8)
}
