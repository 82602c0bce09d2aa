//! Log-likelihood of ranking ballots and its gradient in log-worth space.
//!
//! For a ballot ordering candidates σ(0), σ(1), … the model's probability is
//! Π_i w_{σ(i)} / Σ_{j≥i} w_{σ(j)}: each position picks among the remaining
//! candidates proportionally to worth.

use crate::model::{RankingBallot, WorthVector};
use crate::worth::{BallotSet, WorthError};

/// The sorted candidate list shared by a set of ballots. Gradients and
/// fitted worth vectors are indexed in this order.
pub fn candidate_order(ballots: &[RankingBallot]) -> Result<Vec<String>, WorthError> {
    Ok(BallotSet::build(ballots)?.candidates)
}

/// Sum over ballots of the log model probability. Scale-invariant: scaling
/// every worth by c > 0 leaves the value unchanged.
pub fn log_likelihood(worths: &WorthVector, ballots: &[RankingBallot]) -> Result<f64, WorthError> {
    let set = BallotSet::build(ballots)?;
    let w: Vec<f64> = set
        .candidates
        .iter()
        .map(|c| {
            worths
                .get(c)
                .ok_or_else(|| WorthError::UnknownCandidate(c.clone()))
        })
        .collect::<Result<_, _>>()?;
    let theta: Vec<f64> = w.iter().map(|w| w.ln()).collect();
    Ok(log_likelihood_theta(&theta, &set.orders))
}

/// Log-likelihood with worths given as theta = ln(w). Suffix sums run from
/// the back of each ballot, shifted by the ballot's max theta for stability.
pub(crate) fn log_likelihood_theta(theta: &[f64], orders: &[Vec<usize>]) -> f64 {
    let mut total = 0.0;
    let mut suffix = Vec::new();
    for order in orders {
        let shift = order
            .iter()
            .map(|&i| theta[i])
            .fold(f64::NEG_INFINITY, f64::max);
        // suffix[i] = Σ_{j≥i} exp(theta[σ(j)] − shift)
        suffix.clear();
        suffix.resize(order.len(), 0.0);
        let mut acc = 0.0;
        for (i, &cand) in order.iter().enumerate().rev() {
            acc += (theta[cand] - shift).exp();
            suffix[i] = acc;
        }
        // The last position is a forced choice (log 1), so skip it.
        for (i, &cand) in order.iter().enumerate().take(order.len() - 1) {
            total += (theta[cand] - shift) - suffix[i].ln();
        }
    }
    total
}

/// Analytic gradient of [`log_likelihood_theta`]:
/// ∂LL/∂θ_k = Σ_ballots (1 − w_k · Σ_{positions i ≤ pos(k)} 1/S_i)
/// where S_i is the suffix worth sum at position i. Always sums to zero.
pub(crate) fn grad_log_likelihood_theta(theta: &[f64], orders: &[Vec<usize>]) -> Vec<f64> {
    let mut grad = vec![0.0; theta.len()];
    let mut suffix = Vec::new();
    for order in orders {
        let shift = order
            .iter()
            .map(|&i| theta[i])
            .fold(f64::NEG_INFINITY, f64::max);
        suffix.clear();
        suffix.resize(order.len(), 0.0);
        let mut acc = 0.0;
        for (i, &cand) in order.iter().enumerate().rev() {
            acc += (theta[cand] - shift).exp();
            suffix[i] = acc;
        }
        // inv_acc = Σ_{j ≤ i} 1/S_j, accumulated front to back. The shift
        // cancels between w_k and 1/S_j.
        let mut inv_acc = 0.0;
        for (i, &cand) in order.iter().enumerate() {
            inv_acc += 1.0 / suffix[i];
            grad[cand] += 1.0 - (theta[cand] - shift).exp() * inv_acc;
        }
    }
    grad
}

/// Public gradient entry point: theta is indexed by [`candidate_order`].
pub fn grad_log_likelihood(
    theta: &[f64],
    ballots: &[RankingBallot],
) -> Result<Vec<f64>, WorthError> {
    let set = BallotSet::build(ballots)?;
    if theta.len() != set.candidates.len() {
        return Err(WorthError::ThetaArity {
            got: theta.len(),
            want: set.candidates.len(),
        });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(WorthError::NonFiniteTheta);
    }
    Ok(grad_log_likelihood_theta(theta, &set.orders))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn ballot(expert: &str, order: &[&str]) -> RankingBallot {
        RankingBallot::new(expert, "S1", order.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn worths(pairs: &[(&str, f64)], normalized: bool) -> WorthVector {
        let map: BTreeMap<String, f64> =
            pairs.iter().map(|(c, w)| (c.to_string(), *w)).collect();
        WorthVector::new("S1", map, normalized).unwrap()
    }

    #[test]
    fn two_equal_items_give_log_half() {
        let w = worths(&[("A", 0.5), ("B", 0.5)], true);
        let ll = log_likelihood(&w, &[ballot("e1", &["A", "B"])]).unwrap();
        assert!((ll - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn three_uniform_items_hand_value() {
        // P = (1/3)·(1/2) for any fixed order under equal worths.
        let w = worths(&[("A", 1.0), ("B", 1.0), ("C", 1.0)], false);
        let ll = log_likelihood(&w, &[ballot("e1", &["A", "B", "C"])]).unwrap();
        assert!((ll - ((1.0f64 / 3.0).ln() + 0.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance() {
        let ballots = vec![
            ballot("e1", &["B", "A", "C"]),
            ballot("e2", &["C", "B", "A"]),
        ];
        let base = worths(&[("A", 0.2), ("B", 0.5), ("C", 0.3)], false);
        let scaled = worths(&[("A", 0.2 * 7.3), ("B", 0.5 * 7.3), ("C", 0.3 * 7.3)], false);
        let a = log_likelihood(&base, &ballots).unwrap();
        let b = log_likelihood(&scaled, &ballots).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn pair_gradient_hand_value() {
        // d/dθ_A log(w_A/(w_A+w_B)) at θ = 0 is 1 − 1/2 = +1/2.
        let g = grad_log_likelihood(&[0.0, 0.0], &[ballot("e1", &["A", "B"])]).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-12);
        assert!((g[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_ballots_are_stationary_at_uniform() {
        let perms = [
            ["A", "B", "C"],
            ["A", "C", "B"],
            ["B", "A", "C"],
            ["B", "C", "A"],
            ["C", "A", "B"],
            ["C", "B", "A"],
        ];
        let ballots: Vec<_> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| ballot(&format!("e{i}"), p))
            .collect();
        let g = grad_log_likelihood(&[0.0, 0.0, 0.0], &ballots).unwrap();
        for entry in g {
            assert!(entry.abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ballots = vec![
            ballot("e1", &["B", "D", "A", "C"]),
            ballot("e2", &["A", "B", "C", "D"]),
            ballot("e3", &["D", "C", "B", "A"]),
        ];
        let set = BallotSet::build(&ballots).unwrap();
        let theta = [0.3, -0.7, 1.1, -0.2];
        let analytic = grad_log_likelihood(&theta, &ballots).unwrap();
        let h = 1e-5;
        for k in 0..4 {
            let mut plus = theta;
            let mut minus = theta;
            plus[k] += h;
            minus[k] -= h;
            let fd = (log_likelihood_theta(&plus, &set.orders)
                - log_likelihood_theta(&minus, &set.orders))
                / (2.0 * h);
            let err = (analytic[k] - fd).abs() / f64::max(1.0, analytic[k].abs());
            assert!(err < 1e-6, "component {k}: {} vs {fd}", analytic[k]);
        }
    }

    #[test]
    fn gradient_sums_to_zero() {
        let ballots = vec![
            ballot("e1", &["B", "A", "C"]),
            ballot("e2", &["C", "B", "A"]),
            ballot("e3", &["A", "B", "C"]),
        ];
        let g = grad_log_likelihood(&[1.0, -0.5, 0.25], &ballots).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn mixed_candidate_sets_rejected() {
        let ballots = vec![ballot("e1", &["A", "B"]), ballot("e2", &["A", "C"])];
        assert!(matches!(
            candidate_order(&ballots),
            Err(WorthError::MixedCandidates { .. })
        ));
    }

    #[test]
    fn theta_validation() {
        let ballots = vec![ballot("e1", &["A", "B"])];
        assert!(matches!(
            grad_log_likelihood(&[0.0], &ballots),
            Err(WorthError::ThetaArity { got: 1, want: 2 })
        ));
        assert_eq!(
            grad_log_likelihood(&[f64::NAN, 0.0], &ballots).unwrap_err(),
            WorthError::NonFiniteTheta
        );
    }
}
