//! The repeated-game driver: sampling, feedback, learner updates, player
//! turnover, and the greedy stable sequence.

mod trajectory;

pub use trajectory::{ShiftTracker, Trajectory};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{
    best_response, brute_force_opt, enumeration_size, expected_cost_vector, realized_cost_vectors,
    GameSpec, Objective, EXPECTATION_BUDGET, OPT_BUDGET,
};
use crate::learners::{Feedback, Learner, LearnerConfig, Mode};
use crate::simplex::{ActionDistribution, ActionProfile, CostVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackModel {
    /// Full deviation vector against the sampled opponent actions.
    #[default]
    Realized,
    /// Full deviation vector in expectation over opponents' distributions.
    Expectation,
    /// The played action's payoff only.
    Bandit,
}

/// What a replaced player's private parameters become.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedrawPolicy {
    /// Redraw from the game family (bin permutation or auction value).
    #[default]
    Family,
    /// The newcomer inherits the departing player's parameters.
    Keep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub game: GameSpec,
    /// One learner per player.
    pub learners: Vec<LearnerConfig>,
    pub feedback: FeedbackModel,
    pub horizon: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub turnover_p: f64,
    pub redraw: RedrawPolicy,
}

impl DynamicsConfig {
    /// Every player runs `learner`; one trial, seed 0, static population.
    pub fn new(game: GameSpec, learner: LearnerConfig, feedback: FeedbackModel, horizon: usize) -> Self {
        let learners = vec![learner; game.players()];
        Self {
            game,
            learners,
            feedback,
            horizon,
            trials: 1,
            base_seed: 0,
            turnover_p: 0.0,
            redraw: RedrawPolicy::Family,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let (n, d) = (self.game.players(), self.game.actions());
        if self.horizon == 0 {
            return fail("horizon must be at least one round".into());
        }
        if !(0.0..=1.0).contains(&self.turnover_p) {
            return fail(format!("turnover_p {} outside [0, 1]", self.turnover_p));
        }
        if self.learners.len() != n {
            return fail(format!("{} learners for {n} players", self.learners.len()));
        }
        let mode = match self.game.objective() {
            Objective::CostMin => Mode::Cost,
            Objective::UtilityMax => Mode::Utility,
        };
        for (i, l) in self.learners.iter().enumerate() {
            l.validate()?;
            if l.d != d {
                return fail(format!("learner {i} has {} actions, the game has {d}", l.d));
            }
            if l.mode != mode {
                return fail(format!("learner {i} mode {:?} does not match the game objective", l.mode));
            }
            let bandit_feedback = self.feedback == FeedbackModel::Bandit;
            if l.kind.is_bandit() != bandit_feedback {
                return fail(format!(
                    "learner {i} ({:?}) is incompatible with {:?} feedback",
                    l.kind, self.feedback
                ));
            }
        }
        if self.feedback == FeedbackModel::Expectation && !self.game.has_closed_form_expectation() {
            let needed = enumeration_size(d, n - 1);
            if needed > EXPECTATION_BUDGET {
                return fail(format!(
                    "expectation feedback needs {needed} profile evaluations per player, limit {EXPECTATION_BUDGET}"
                ));
            }
        }
        let needed = enumeration_size(d, n);
        if needed > OPT_BUDGET {
            return fail(format!("optimum needs {needed} profile evaluations, limit {OPT_BUDGET}"));
        }
        Ok(())
    }
}

/// Independent stream `stream` of trial `trial`.
pub fn trial_rng(base_seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&base_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream);
    rng
}

/// Players replaced this round, each independently with probability `p`.
pub fn turnover_step<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    if p <= 0.0 {
        return Vec::new();
    }
    (0..n).filter(|_| rng.gen_bool(p.min(1.0))).collect()
}

/// Per-player change of the stable sequence in one round.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShiftDelta {
    pub changed: bool,
    /// `|| s*_i^t - s*_i^{t-1} ||_1` between point masses.
    pub tv: f64,
}

/// Greedy update of the stable sequence: replaced players, in index order,
/// best-respond to the current strategies; everyone else keeps theirs.
/// A replacement always counts as one change for that player slot, since its
/// learner restarts against a new cost function.
pub fn stable_sequence_step(
    game: &GameSpec,
    previous: &ActionProfile,
    replaced: &[usize],
) -> (ActionProfile, Vec<ShiftDelta>) {
    let mut next = previous.0.clone();
    let mut deltas = vec![ShiftDelta::default(); game.players()];
    for &i in replaced {
        next[i] = best_response(game, &next, i);
        deltas[i] = ShiftDelta { changed: true, tv: 2.0 };
    }
    (ActionProfile(next), deltas)
}

/// Feedback per player, and the full payoff vectors it came from.
pub fn dispatch_feedback(
    model: FeedbackModel,
    game: &GameSpec,
    distributions: &[ActionDistribution],
    profile: &ActionProfile,
) -> Result<(Vec<Feedback>, Vec<CostVector>)> {
    let realized = realized_cost_vectors(game, profile)?;
    match model {
        FeedbackModel::Realized => {
            Ok((realized.iter().cloned().map(Feedback::Full).collect(), realized))
        }
        FeedbackModel::Expectation => {
            let expected = (0..game.players())
                .map(|i| expected_cost_vector(game, distributions, i))
                .collect::<Result<Vec<_>>>()?;
            Ok((expected.iter().cloned().map(Feedback::Full).collect(), expected))
        }
        FeedbackModel::Bandit => {
            let feedback = realized
                .iter()
                .zip(profile.actions())
                .map(|(c, &a)| Feedback::Bandit { played: a, observed: c.values()[a] })
                .collect();
            Ok((feedback, realized))
        }
    }
}

/// Runs trial `trial` of `config` to completion.
pub fn run_dynamics(config: &DynamicsConfig, trial: usize) -> Result<Trajectory> {
    config.validate()?;
    let mut game = config.game.clone();
    let (n, d) = (game.players(), game.actions());
    let mut learners = config
        .learners
        .iter()
        .map(|c| Learner::new(*c))
        .collect::<Result<Vec<_>>>()?;
    let mut player_rngs: Vec<ChaCha8Rng> =
        (0..n).map(|i| trial_rng(config.base_seed, trial as u64, i as u64)).collect();
    let mut turnover_rng = trial_rng(config.base_seed, trial as u64, n as u64);
    let mut redraw_rng = trial_rng(config.base_seed, trial as u64, n as u64 + 1);

    let (opt_profile, mut opt) = brute_force_opt(&game)?;
    let mut stable = opt_profile;
    let mut trajectory = Trajectory::with_capacity(n, d, config.horizon, game.objective());

    for t in 0..config.horizon {
        let distributions: Vec<ActionDistribution> =
            learners.iter().map(|l| l.distribution().clone()).collect();
        let profile = ActionProfile(
            distributions.iter().zip(&mut player_rngs).map(|(w, rng)| w.sample(rng)).collect(),
        );
        let (feedback, vectors) = dispatch_feedback(config.feedback, &game, &distributions, &profile)?;
        for (learner, f) in learners.iter_mut().zip(&feedback) {
            learner.observe(f)?;
        }
        let social = game.social_value(profile.actions());
        let stable_social = game.social_value(stable.actions());
        // The record holds the optimum and stable profile in force this round;
        // a turnover at the end of the round takes effect from the next one.
        let (round_opt, round_stable) = (opt, stable.clone());

        // A turnover after the final round would only affect rounds never played.
        let replaced = if t + 1 < config.horizon {
            turnover_step(n, config.turnover_p, &mut turnover_rng)
        } else {
            Vec::new()
        };
        let mut deltas = Vec::new();
        if !replaced.is_empty() {
            for &i in &replaced {
                if config.redraw == RedrawPolicy::Family {
                    game.redraw_player(i, &mut redraw_rng);
                }
                learners[i].reset();
            }
            opt = brute_force_opt(&game)?.1;
            let (next, step) = stable_sequence_step(&game, &stable, &replaced);
            stable = next;
            deltas = step;
        }
        trajectory.push_round(
            &distributions,
            &profile,
            &vectors,
            social,
            round_opt,
            &round_stable,
            stable_social,
            replaced,
            &deltas,
        );
    }
    Ok(trajectory)
}

/// Runs every trial of `config` in parallel and reduces each trajectory with
/// `reduce` as soon as it finishes. Results come back in trial order.
pub fn run_trials<S, F>(config: &DynamicsConfig, reduce: F) -> Result<Vec<S>>
where
    S: Send,
    F: Fn(usize, Trajectory) -> Result<S> + Sync,
{
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|trial| reduce(trial, run_dynamics(config, trial)?))
        .collect()
}

#[cfg(test)]
mod tests;
