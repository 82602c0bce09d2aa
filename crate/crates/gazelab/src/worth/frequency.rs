//! Rank-frequency counting over ranking ballots.

use crate::model::RankingBallot;
use crate::worth::{BallotSet, WorthError};

/// How often each candidate landed at each rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFrequency {
    /// Candidates in sorted order; one column of `counts` each.
    pub candidates: Vec<String>,
    /// `counts[rank][candidate_index]`, rank 0 = first place.
    pub counts: Vec<Vec<u32>>,
}

impl RankFrequency {
    /// Count for `candidate` at 1-based `rank`.
    pub fn count(&self, candidate: &str, rank: usize) -> Option<u32> {
        let col = self.candidates.iter().position(|c| c == candidate)?;
        self.counts.get(rank.checked_sub(1)?).map(|row| row[col])
    }
}

/// Tallies how many ballots placed each candidate at each rank. All ballots
/// must range over the same candidate set.
pub fn rank_frequency(ballots: &[RankingBallot]) -> Result<RankFrequency, WorthError> {
    let set = BallotSet::build(ballots)?;
    let m = set.candidates.len();
    let mut counts = vec![vec![0u32; m]; m];
    for order in &set.orders {
        for (rank, &candidate) in order.iter().enumerate() {
            counts[rank][candidate] += 1;
        }
    }
    Ok(RankFrequency {
        candidates: set.candidates,
        counts,
    })
}
