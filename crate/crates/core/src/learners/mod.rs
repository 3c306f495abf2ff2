//! Learning algorithms as single-owner state machines: observe the feedback
//! for round `t`, expose the distribution for round `t + 1`.

mod bandit;
mod hedge;

pub use bandit::{
    apply_normalizer, importance_weighted_estimate, log_barrier_bandit_update,
    solve_normalizer_gamma, GAMMA_MAX_ITERATIONS, GAMMA_TOLERANCE,
};
pub use hedge::{
    hedge_update, noisy_hedge_update, optimistic_hedge_update, tuned_hedge_step,
    tuned_learning_rate, DoublingSchedule,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{ActionDistribution, CostVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Hedge,
    TunedHedge,
    OptimisticHedge,
    NoisyHedge,
    LogBarrierBandit,
}

impl LearnerKind {
    pub fn is_bandit(self) -> bool {
        matches!(self, LearnerKind::LogBarrierBandit)
    }
}

/// Whether payoffs are costs to minimize or utilities to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Cost,
    Utility,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    /// Learning rate. Ignored by `TunedHedge`, which schedules its own.
    pub eta: f64,
    /// Uniform mixing for `NoisyHedge`.
    pub theta: f64,
    pub mode: Mode,
    pub d: usize,
    pub horizon: usize,
}

impl LearnerConfig {
    /// A config with `theta = 1/T`, cost mode.
    pub fn new(kind: LearnerKind, eta: f64, d: usize, horizon: usize) -> Self {
        Self { kind, eta, theta: 1.0 / horizon.max(1) as f64, mode: Mode::Cost, d, horizon }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Learning rate that certifies approximation `epsilon` for this kind:
    /// Hedge `eps` (utilities `eps/(e-1)`), Optimistic `eps/8`, Noisy `eps`,
    /// log-barrier `eps/(1+eps)`.
    pub fn eta_for_epsilon(kind: LearnerKind, mode: Mode, epsilon: f64) -> f64 {
        match (kind, mode) {
            (LearnerKind::Hedge, Mode::Utility) => epsilon / (std::f64::consts::E - 1.0),
            (LearnerKind::Hedge | LearnerKind::NoisyHedge | LearnerKind::TunedHedge, _) => epsilon,
            (LearnerKind::OptimisticHedge, _) => epsilon / 8.0,
            (LearnerKind::LogBarrierBandit, _) => epsilon / (1.0 + epsilon),
        }
    }

    /// Approximate-regret budget `A` this learner certifies at `epsilon`
    /// when run with [`LearnerConfig::eta_for_epsilon`]. For `NoisyHedge`
    /// this is the per-shift budget, so `K` shifts cost `(1 + K) A / eps`.
    pub fn a_budget(&self, epsilon: f64) -> f64 {
        let (d, t) = (self.d as f64, self.horizon as f64);
        match (self.kind, self.mode) {
            (LearnerKind::Hedge, Mode::Cost) => d.ln(),
            (LearnerKind::Hedge, Mode::Utility) => (std::f64::consts::E - 1.0) * d.ln(),
            (LearnerKind::OptimisticHedge, _) => 8.0 * d.ln(),
            (LearnerKind::NoisyHedge, _) => 2.0 * (d * t).ln(),
            (LearnerKind::TunedHedge, _) => 16.0 * d.ln(),
            (LearnerKind::LogBarrierBandit, _) => {
                d * (t / d).ln().max(0.0) * (1.0 + epsilon) + epsilon * d
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.d == 0 {
            return fail("learner needs at least one action".into());
        }
        if self.horizon == 0 {
            return fail("horizon must be at least one round".into());
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return fail(format!("theta {} outside [0, 1]", self.theta));
        }
        match self.kind {
            LearnerKind::TunedHedge => Ok(()),
            LearnerKind::OptimisticHedge if !(self.eta > 0.0 && self.eta < 0.25) => {
                fail(format!("optimistic hedge needs 0 < eta < 1/4, got {}", self.eta))
            }
            LearnerKind::LogBarrierBandit if !(self.eta > 0.0 && self.eta < 1.0) => {
                fail(format!("log-barrier bandit needs 0 < eta < 1, got {}", self.eta))
            }
            _ if !(self.eta > 0.0 && self.eta.is_finite()) => {
                fail(format!("learning rate must be positive, got {}", self.eta))
            }
            _ => Ok(()),
        }
    }
}

/// What a player observes at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub enum Feedback {
    /// The payoff of every action against the others' play.
    Full(CostVector),
    /// Only the payoff of the action actually played.
    Bandit { played: usize, observed: f64 },
}

/// Feedback after the mode's sign convention: losses to be minimized.
#[derive(Debug, Clone, PartialEq)]
pub enum SignedFeedback {
    Full(Vec<f64>),
    Bandit { played: usize, loss: f64 },
}

/// Reads payoffs as losses: identity for costs, negation for utilities.
pub fn apply_mode(feedback: &Feedback, mode: Mode) -> SignedFeedback {
    let sign = match mode {
        Mode::Cost => 1.0,
        Mode::Utility => -1.0,
    };
    match feedback {
        Feedback::Full(c) => SignedFeedback::Full(c.values().iter().map(|x| sign * x).collect()),
        Feedback::Bandit { played, observed } => {
            SignedFeedback::Bandit { played: *played, loss: sign * observed }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    /// Distribution played this round.
    pub current: ActionDistribution,
    /// Secondary sequence `g` for Optimistic and Noisy Hedge.
    pub auxiliary: Option<ActionDistribution>,
    /// Previous round's losses (the optimistic prediction).
    pub last_cost: Option<Vec<f64>>,
    pub round: usize,
    pub schedule: Option<DoublingSchedule>,
}

#[derive(Debug, Clone)]
pub struct Learner {
    config: LearnerConfig,
    state: LearnerState,
}

impl Learner {
    pub fn new(config: LearnerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { state: Self::initial_state(&config), config })
    }

    fn initial_state(config: &LearnerConfig) -> LearnerState {
        let uniform = ActionDistribution::uniform(config.d);
        let (auxiliary, last_cost, schedule) = match config.kind {
            LearnerKind::OptimisticHedge => {
                (Some(uniform.clone()), Some(vec![0.0; config.d]), None)
            }
            LearnerKind::NoisyHedge => (Some(uniform.clone()), None, None),
            LearnerKind::TunedHedge => (None, None, Some(DoublingSchedule::new())),
            _ => (None, None, None),
        };
        LearnerState { current: uniform, auxiliary, last_cost, round: 1, schedule }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }

    pub fn distribution(&self) -> &ActionDistribution {
        &self.state.current
    }

    /// Back to the uniform prior, as for a newly arrived player.
    pub fn reset(&mut self) {
        self.state = Self::initial_state(&self.config);
    }

    pub fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let signed = apply_mode(feedback, self.config.mode);
        let w = &self.state.current;
        let eta = self.config.eta;
        let next = match (self.config.kind, signed) {
            (LearnerKind::Hedge, SignedFeedback::Full(l)) => hedge_update(w, &l, eta)?,
            (LearnerKind::OptimisticHedge, SignedFeedback::Full(l)) => {
                let g = self.state.auxiliary.as_ref().expect("optimistic state carries g");
                let (g_next, w_next) = optimistic_hedge_update(g, &l, eta)?;
                self.state.auxiliary = Some(g_next);
                self.state.last_cost = Some(l);
                w_next
            }
            (LearnerKind::NoisyHedge, SignedFeedback::Full(l)) => {
                let (g_next, w_next) = noisy_hedge_update(w, &l, eta, self.config.theta)?;
                self.state.auxiliary = Some(g_next);
                w_next
            }
            (LearnerKind::TunedHedge, SignedFeedback::Full(l)) => {
                let schedule = self.state.schedule.as_mut().expect("tuned state carries a schedule");
                tuned_hedge_step(schedule, w, &l)?
            }
            (LearnerKind::LogBarrierBandit, SignedFeedback::Bandit { played, .. }) => {
                let Feedback::Bandit { observed, .. } = feedback else { unreachable!() };
                log_barrier_bandit_update(w, played, *observed, eta, self.config.mode)?
            }
            (kind, SignedFeedback::Full(_)) => {
                return Err(Error::Config(format!("{kind:?} needs bandit feedback")))
            }
            (kind, SignedFeedback::Bandit { .. }) => {
                return Err(Error::Config(format!("{kind:?} needs full-information feedback")))
            }
        };
        self.state.current = next;
        self.state.round += 1;
        Ok(())
    }
}
