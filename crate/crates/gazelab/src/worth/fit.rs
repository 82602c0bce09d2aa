//! Gradient-ascent fit of worth scores with backtracking line search.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::model::{RankingBallot, WorthVector};
use crate::worth::likelihood::{grad_log_likelihood_theta, log_likelihood_theta};
use crate::worth::{BallotSet, WorthError};

/// Solver hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub max_iters: usize,
    /// Initial line-search step; the search halves it until the ascent
    /// condition holds and re-expands after successful iterations.
    pub step: f64,
    /// Convergence tolerance on the gradient ∞-norm.
    pub grad_tol: f64,
    /// Gaussian prior weight on centered log-worths. Keeps the optimum
    /// finite when ballots are unanimous; 0 gives the pure MLE.
    pub ridge: f64,
    /// When set, initial theta is jittered uniformly in ±0.01 instead of
    /// starting at exactly 0. Useful to break symmetric ties.
    pub seed: Option<u64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iters: 10_000,
            step: 0.1,
            grad_tol: 1e-8,
            ridge: 1e-3,
            seed: None,
        }
    }
}

impl FitConfig {
    fn check(&self) -> Result<(), WorthError> {
        if self.max_iters == 0 {
            return Err(WorthError::BadConfig("max_iters must be ≥ 1".into()));
        }
        if !(self.step > 0.0) {
            return Err(WorthError::BadConfig(format!(
                "step must be > 0, got {}",
                self.step
            )));
        }
        if !(self.grad_tol > 0.0) {
            return Err(WorthError::BadConfig(format!(
                "grad_tol must be > 0, got {}",
                self.grad_tol
            )));
        }
        if !(self.ridge >= 0.0) {
            return Err(WorthError::BadConfig(format!(
                "ridge must be ≥ 0, got {}",
                self.ridge
            )));
        }
        Ok(())
    }
}

/// A fitted worth vector plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Normalized worths (softmax of the final theta), summing to 1.
    pub worths: WorthVector,
    pub converged: bool,
    pub iterations: usize,
    /// Final objective-gradient ∞-norm.
    pub grad_norm: f64,
    /// Pure data log-likelihood at the final theta (prior excluded).
    pub log_likelihood: f64,
}

fn center(theta: &mut [f64]) {
    let mean = theta.iter().sum::<f64>() / theta.len() as f64;
    for t in theta.iter_mut() {
        *t -= mean;
    }
}

/// Maximizes log-likelihood − (ridge/2)·‖theta‖² over mean-centered theta by
/// gradient ascent with an Armijo backtracking line search, then returns the
/// softmax-normalized worths. Centering fixes the model's scale-invariance
/// gauge without constraining the optimum.
pub fn fit_worth(ballots: &[RankingBallot], config: &FitConfig) -> Result<FitResult, WorthError> {
    config.check()?;
    let set = BallotSet::build(ballots)?;
    let problem_id = ballots[0].problem_id.clone();
    if let Some(other) = ballots.iter().find(|b| b.problem_id != problem_id) {
        return Err(WorthError::MixedProblems(
            problem_id,
            other.problem_id.clone(),
        ));
    }
    let m = set.candidates.len();

    let mut theta = vec![0.0; m];
    if let Some(seed) = config.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in theta.iter_mut() {
            *t = rng.random_range(-0.01..0.01);
        }
    }
    center(&mut theta);

    let objective = |theta: &[f64]| {
        log_likelihood_theta(theta, &set.orders)
            - 0.5 * config.ridge * theta.iter().map(|t| t * t).sum::<f64>()
    };
    let gradient = |theta: &[f64]| {
        let mut g = grad_log_likelihood_theta(theta, &set.orders);
        for (gk, tk) in g.iter_mut().zip(theta) {
            *gk -= config.ridge * tk;
        }
        g
    };

    let sup_norm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut value = objective(&theta);
    let mut step = config.step;
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    for iter in 0..config.max_iters {
        iterations = iter;
        let g = gradient(&theta);
        grad_norm = sup_norm(&g);
        if grad_norm < config.grad_tol {
            converged = true;
            break;
        }
        let g_sq: f64 = g.iter().map(|v| v * v).sum();
        // Armijo condition: f(θ + t·g) ≥ f(θ) + c·t·‖g‖², c = 1e-4.
        let mut t = step;
        let mut accepted = false;
        while t > 1e-18 {
            let mut candidate: Vec<f64> =
                theta.iter().zip(&g).map(|(th, gk)| th + t * gk).collect();
            center(&mut candidate);
            let candidate_value = objective(&candidate);
            let armijo_rhs = value + 1e-4 * t * g_sq;
            // Near the optimum the Armijo threshold rounds to `value` itself
            // and the objective goes blind; there, require a strict gradient
            // decrease instead, which stays resolvable far below the
            // objective's rounding plateau.
            let ok = if armijo_rhs > value {
                candidate_value >= armijo_rhs
            } else {
                candidate_value >= value && sup_norm(&gradient(&candidate)) < grad_norm
            };
            if ok {
                theta = candidate;
                value = candidate_value;
                accepted = true;
                break;
            }
            t /= 2.0;
        }
        if !accepted {
            // The line search stalled below machine precision: no ascent
            // direction remains at this scale.
            break;
        }
        // Re-expand so a conservatively small accepted step cannot pin all
        // later iterations to tiny progress.
        step = (t * 2.0).min(1e3);
    }

    let shift = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = theta.iter().map(|t| (t - shift).exp()).collect();
    let total: f64 = exp.iter().sum();
    let worths: BTreeMap<String, f64> = set
        .candidates
        .iter()
        .cloned()
        .zip(exp.iter().map(|e| e / total))
        .collect();
    Ok(FitResult {
        worths: WorthVector::new(problem_id, worths, true)
            .expect("softmax worths are positive and sum to one"),
        converged,
        iterations,
        grad_norm,
        log_likelihood: log_likelihood_theta(&theta, &set.orders),
    })
}
