//! Worthiness inference: fits latent worth scores from expert ranking
//! ballots under the sequential-choice ranking model, where a ballot picks
//! its next item with probability proportional to the remaining items'
//! worths.

mod fit;
mod frequency;
mod likelihood;
mod sample;

pub use fit::{fit_worth, FitConfig, FitResult};
pub use frequency::{rank_frequency, RankFrequency};
pub use likelihood::{candidate_order, grad_log_likelihood, log_likelihood};
pub use sample::sample_ballots;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WorthError {
    #[error("need at least one ballot")]
    EmptyBallots,
    #[error("need at least two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("ballot of `{expert_id}` ranks a different candidate set")]
    MixedCandidates { expert_id: String },
    #[error("ballots span problems `{0}` and `{1}`; fit one problem at a time")]
    MixedProblems(String, String),
    #[error("worth vector is missing candidate `{0}`")]
    UnknownCandidate(String),
    #[error("theta has {got} entries but there are {want} candidates")]
    ThetaArity { got: usize, want: usize },
    #[error("theta must be finite")]
    NonFiniteTheta,
    #[error("bad fit config: {0}")]
    BadConfig(String),
}

/// Ballots in index form over a shared, sorted candidate list.
pub(crate) struct BallotSet {
    pub candidates: Vec<String>,
    pub orders: Vec<Vec<usize>>,
}

impl BallotSet {
    pub fn build(ballots: &[crate::model::RankingBallot]) -> Result<Self, WorthError> {
        let first = ballots.first().ok_or(WorthError::EmptyBallots)?;
        let candidates: Vec<String> =
            first.candidates().into_iter().map(str::to_string).collect();
        if candidates.len() < 2 {
            return Err(WorthError::TooFewCandidates(candidates.len()));
        }
        let index: std::collections::HashMap<&str, usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut orders = Vec::with_capacity(ballots.len());
        for ballot in ballots {
            if ballot.order().len() != candidates.len() {
                return Err(WorthError::MixedCandidates {
                    expert_id: ballot.expert_id.clone(),
                });
            }
            let mut order = Vec::with_capacity(candidates.len());
            for candidate in ballot.order() {
                let Some(&i) = index.get(candidate.as_str()) else {
                    return Err(WorthError::MixedCandidates {
                        expert_id: ballot.expert_id.clone(),
                    });
                };
                order.push(i);
            }
            orders.push(order);
        }
        Ok(BallotSet { candidates, orders })
    }
}
