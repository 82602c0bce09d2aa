//! Forward sampler for the sequential-choice ranking model.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::model::{RankingBallot, WorthVector};
use crate::worth::WorthError;

/// Draws `n` full ranking ballots from the sequential-choice model: each rank
/// is filled by sampling without replacement with probability proportional to
/// the remaining worths. Deterministic for a given seed.
pub fn sample_ballots(
    worths: &WorthVector,
    n: usize,
    seed: u64,
) -> Result<Vec<RankingBallot>, WorthError> {
    if worths.worths().len() < 2 {
        return Err(WorthError::TooFewCandidates(worths.worths().len()));
    }
    let base: Vec<(&String, f64)> = worths.worths().iter().map(|(c, &w)| (c, w)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ballots = Vec::with_capacity(n);
    for b in 0..n {
        let mut remaining = base.clone();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let total: f64 = remaining.iter().map(|(_, w)| w).sum();
            let draw = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = remaining.len() - 1;
            for (i, (_, w)) in remaining.iter().enumerate() {
                acc += w;
                if draw < acc {
                    pick = i;
                    break;
                }
            }
            order.push(remaining.remove(pick).0.clone());
        }
        let ballot = RankingBallot::new(format!("sim-{:05}", b + 1), &worths.problem_id, order)
            .expect("sampled order is a permutation of ≥ 2 distinct candidates");
        ballots.push(ballot);
    }
    Ok(ballots)
}
