use serde::{Deserialize, Serialize};

use super::ShiftDelta;
use crate::games::Objective;
use crate::simplex::{ActionProfile, CostVector, ActionDistribution};

/// Per-player counts of stable-sequence changes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftTracker {
    /// Rounds in which `s*_i` changed.
    pub k_changes: Vec<u64>,
    /// Total variation `sum_t || s*_i^t - s*_i^{t-1} ||_1`.
    pub k_tv: Vec<f64>,
}

impl ShiftTracker {
    pub fn new(n: usize) -> Self {
        Self { k_changes: vec![0; n], k_tv: vec![0.0; n] }
    }

    pub fn apply(&mut self, deltas: &[ShiftDelta]) {
        for (i, delta) in deltas.iter().enumerate() {
            if delta.changed {
                self.k_changes[i] += 1;
            }
            self.k_tv[i] += delta.tv;
        }
    }

    pub fn total_changes(&self) -> u64 {
        self.k_changes.iter().sum()
    }

    pub fn total_tv(&self) -> f64 {
        self.k_tv.iter().sum()
    }
}

/// Everything observed in one trial, stored flat and round-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    n: usize,
    d: usize,
    objective: Objective,
    distributions: Vec<f64>,
    payoffs: Vec<f64>,
    profiles: Vec<usize>,
    stable: Vec<usize>,
    social: Vec<f64>,
    opt: Vec<f64>,
    stable_social: Vec<f64>,
    turnovers: Vec<Vec<usize>>,
    shifts: ShiftTracker,
}

impl Trajectory {
    pub fn with_capacity(n: usize, d: usize, rounds: usize, objective: Objective) -> Self {
        Self {
            n,
            d,
            objective,
            distributions: Vec::with_capacity(rounds * n * d),
            payoffs: Vec::with_capacity(rounds * n * d),
            profiles: Vec::with_capacity(rounds * n),
            stable: Vec::with_capacity(rounds * n),
            social: Vec::with_capacity(rounds),
            opt: Vec::with_capacity(rounds),
            stable_social: Vec::with_capacity(rounds),
            turnovers: Vec::with_capacity(rounds),
            shifts: ShiftTracker::new(n),
        }
    }

    /// Appends one round. `vectors` are the full payoff vectors of each player
    /// (the feedback under full information, the true vector under bandits).
    #[allow(clippy::too_many_arguments)]
    pub fn push_round(
        &mut self,
        distributions: &[ActionDistribution],
        profile: &ActionProfile,
        vectors: &[CostVector],
        social: f64,
        opt: f64,
        stable: &ActionProfile,
        stable_social: f64,
        turnovers: Vec<usize>,
        deltas: &[ShiftDelta],
    ) {
        for w in distributions {
            self.distributions.extend_from_slice(w.weights());
        }
        for c in vectors {
            self.payoffs.extend_from_slice(c.values());
        }
        self.profiles.extend_from_slice(profile.actions());
        self.stable.extend_from_slice(stable.actions());
        self.social.push(social);
        self.opt.push(opt);
        self.stable_social.push(stable_social);
        self.turnovers.push(turnovers);
        self.shifts.apply(deltas);
    }

    pub fn horizon(&self) -> usize {
        self.social.len()
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn actions(&self) -> usize {
        self.d
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn distribution(&self, t: usize, i: usize) -> &[f64] {
        let at = (t * self.n + i) * self.d;
        &self.distributions[at..at + self.d]
    }

    pub fn payoff_vector(&self, t: usize, i: usize) -> &[f64] {
        let at = (t * self.n + i) * self.d;
        &self.payoffs[at..at + self.d]
    }

    pub fn profile(&self, t: usize) -> &[usize] {
        &self.profiles[t * self.n..(t + 1) * self.n]
    }

    /// Stable-sequence profile `s*^t`.
    pub fn stable(&self, t: usize) -> &[usize] {
        &self.stable[t * self.n..(t + 1) * self.n]
    }

    pub fn social(&self) -> &[f64] {
        &self.social
    }

    pub fn opt(&self) -> &[f64] {
        &self.opt
    }

    pub fn stable_social(&self) -> &[f64] {
        &self.stable_social
    }

    /// Players replaced at the end of round `t`.
    pub fn turnovers(&self, t: usize) -> &[usize] {
        &self.turnovers[t]
    }

    pub fn shifts(&self) -> &ShiftTracker {
        &self.shifts
    }

    /// Player `i`'s payoff history as rows `c_i^t`.
    pub fn payoff_history(&self, i: usize) -> Vec<Vec<f64>> {
        (0..self.horizon()).map(|t| self.payoff_vector(t, i).to_vec()).collect()
    }

    /// `sum_t <w_i^t, c_i^t>`.
    pub fn learner_total(&self, i: usize) -> f64 {
        (0..self.horizon())
            .map(|t| {
                self.distribution(t, i)
                    .iter()
                    .zip(self.payoff_vector(t, i))
                    .map(|(w, c)| w * c)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Largest ratio between the stable profile's objective and the optimum
    /// (oriented so that 1 is optimal and larger is worse).
    pub fn measured_rho(&self) -> f64 {
        self.stable_social
            .iter()
            .zip(&self.opt)
            .map(|(&s, &o)| match self.objective {
                Objective::CostMin if o > 0.0 => s / o,
                Objective::CostMin => if s > 0.0 { f64::INFINITY } else { 1.0 },
                Objective::UtilityMax if s > 0.0 => o / s,
                Objective::UtilityMax => if o > 0.0 { f64::INFINITY } else { 1.0 },
            })
            .fold(1.0, f64::max)
    }

    pub fn mean_social(&self) -> f64 {
        mean(&self.social)
    }

    pub fn mean_opt(&self) -> f64 {
        mean(&self.opt)
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}
