//! Pairwise viewing commonality: cosine similarity between participants'
//! binary viewed-image vectors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::analytics::{median, AnalyticsError};
use crate::model::DwellRecord;

/// Symmetric cosine and common-count matrices over participants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonalityMatrix {
    pub participant_ids: Vec<String>,
    /// Row-major n×n cosine similarities in [0, 1].
    cosine: Vec<f64>,
    /// Row-major n×n counts of commonly viewed images.
    common_counts: Vec<u32>,
    /// Sessions excluded because they viewed nothing.
    pub excluded: Vec<String>,
}

impl CommonalityMatrix {
    pub fn len(&self) -> usize {
        self.participant_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.participant_ids.is_empty()
    }

    pub fn cosine(&self, i: usize, j: usize) -> f64 {
        self.cosine[i * self.len() + j]
    }

    pub fn common_count(&self, i: usize, j: usize) -> u32 {
        self.common_counts[i * self.len() + j]
    }

    /// Off-diagonal cosines in fixed (i < j) order.
    pub fn pairwise_cosines(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.cosine(i, j));
            }
        }
        out
    }

    pub fn mean_cosine(&self) -> f64 {
        let pairs = self.pairwise_cosines();
        pairs.iter().sum::<f64>() / pairs.len() as f64
    }

    pub fn median_cosine(&self) -> f64 {
        median(&self.pairwise_cosines())
    }
}

/// Builds the commonality matrix from per-session dwell records. A session's
/// viewing vector is the binary indicator of images with positive dwell;
/// sessions that viewed nothing are excluded (and reported as such).
pub fn viewing_commonality(
    sessions: &[(String, Vec<DwellRecord>)],
) -> Result<CommonalityMatrix, AnalyticsError> {
    let mut ids = Vec::new();
    let mut sets: Vec<BTreeSet<&str>> = Vec::new();
    let mut excluded = Vec::new();
    for (session_id, records) in sessions {
        let set: BTreeSet<&str> = records
            .iter()
            .filter(|r| r.total_dwell > 0.0)
            .map(|r| r.image_id.as_str())
            .collect();
        if set.is_empty() {
            excluded.push(session_id.clone());
        } else {
            ids.push(session_id.clone());
            sets.push(set);
        }
    }
    let n = ids.len();
    if n < 2 {
        return Err(AnalyticsError::TooFewSessions(n));
    }
    let mut cosine = vec![0.0; n * n];
    let mut common_counts = vec![0u32; n * n];
    for i in 0..n {
        cosine[i * n + i] = 1.0;
        common_counts[i * n + i] = sets[i].len() as u32;
        for j in (i + 1)..n {
            let common = sets[i].intersection(&sets[j]).count();
            // Binary vectors: cosine = |A∩B| / sqrt(|A|·|B|).
            let cos = common as f64 / ((sets[i].len() * sets[j].len()) as f64).sqrt();
            cosine[i * n + j] = cos;
            cosine[j * n + i] = cos;
            common_counts[i * n + j] = common as u32;
            common_counts[j * n + i] = common as u32;
        }
    }
    Ok(CommonalityMatrix {
        participant_ids: ids,
        cosine,
        common_counts,
        excluded,
    })
}
