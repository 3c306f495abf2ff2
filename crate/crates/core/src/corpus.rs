//! Adversarial and random payoff streams for exercising learners in
//! isolation, and a harness that runs one learner against one stream.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::{Feedback, Learner, LearnerConfig};
use crate::simplex::{ActionDistribution, CostVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKind {
    /// Independent uniform payoffs.
    Uniform,
    /// Each action is Bernoulli with its own fixed mean.
    Bernoulli,
    /// One action has mean `0.5 - gap`, the rest mean `0.5`.
    Gap { gap: f64 },
    /// Payoff 1 on the learner's most likely action, 0 elsewhere.
    ArgmaxPunisher,
    /// `shifts + 1` equal segments, each with its own good action.
    PlantedShifts { shifts: u32 },
    /// Unit payoff rotating through the actions every round.
    Alternating,
    /// Zero except for rare unit payoffs.
    Sparse { rate: f64 },
}

impl StreamKind {
    /// The mixed corpus used by the certificate suites.
    pub fn corpus() -> Vec<StreamKind> {
        vec![
            StreamKind::Uniform,
            StreamKind::Bernoulli,
            StreamKind::Gap { gap: 0.1 },
            StreamKind::ArgmaxPunisher,
            StreamKind::PlantedShifts { shifts: 3 },
            StreamKind::Alternating,
            StreamKind::Sparse { rate: 0.05 },
        ]
    }
}

/// A payoff stream that may react to the learner's current distribution.
#[derive(Debug, Clone)]
pub struct Adversary {
    kind: StreamKind,
    d: usize,
    horizon: usize,
    rng: ChaCha8Rng,
    means: Vec<f64>,
    good: Vec<usize>,
}

impl Adversary {
    pub fn new(kind: StreamKind, d: usize, horizon: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let means = (0..d).map(|_| rng.gen::<f64>()).collect();
        let segments = match kind {
            StreamKind::PlantedShifts { shifts } => shifts as usize + 1,
            StreamKind::Gap { .. } => 1,
            _ => 0,
        };
        let mut good: Vec<usize> = Vec::with_capacity(segments);
        for _ in 0..segments {
            // Consecutive segments get different good actions when d > 1.
            let mut a = rng.gen_range(0..d);
            while d > 1 && good.last() == Some(&a) {
                a = rng.gen_range(0..d);
            }
            good.push(a);
        }
        Self { kind, d, horizon, rng, means, good }
    }

    /// Payoff vector for round `t` (0-based) given the learner's distribution.
    pub fn next(&mut self, t: usize, w: &ActionDistribution) -> Vec<f64> {
        let d = self.d;
        match self.kind {
            StreamKind::Uniform => (0..d).map(|_| self.rng.gen::<f64>()).collect(),
            StreamKind::Bernoulli => {
                (0..d).map(|j| if self.rng.gen_bool(self.means[j]) { 1.0 } else { 0.0 }).collect()
            }
            StreamKind::Gap { gap } => {
                let good = self.good[0];
                (0..d)
                    .map(|j| {
                        let mean = if j == good { 0.5 - gap } else { 0.5 };
                        if self.rng.gen_bool(mean.clamp(0.0, 1.0)) { 1.0 } else { 0.0 }
                    })
                    .collect()
            }
            StreamKind::ArgmaxPunisher => {
                let weights = w.weights();
                let mut top = 0;
                for j in 1..d {
                    if weights[j] > weights[top] {
                        top = j;
                    }
                }
                (0..d).map(|j| if j == top { 1.0 } else { 0.0 }).collect()
            }
            StreamKind::PlantedShifts { .. } => {
                let segment = (t * self.good.len() / self.horizon.max(1)).min(self.good.len() - 1);
                let good = self.good[segment];
                (0..d)
                    .map(|j| {
                        let mean = if j == good { 0.2 } else { 0.7 };
                        if self.rng.gen_bool(mean) { 1.0 } else { 0.0 }
                    })
                    .collect()
            }
            StreamKind::Alternating => (0..d).map(|j| if j == t % d { 1.0 } else { 0.0 }).collect(),
            StreamKind::Sparse { rate } => {
                (0..d).map(|_| if self.rng.gen_bool(rate) { 1.0 } else { 0.0 }).collect()
            }
        }
    }
}

/// Outcome of one learner-versus-stream run.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamRun {
    /// Payoff vectors `c^t` in order.
    pub payoffs: Vec<Vec<f64>>,
    /// `sum_t <w^t, c^t>`.
    pub learner_total: f64,
}

/// Plays `learner` against `adversary` for `horizon` rounds. Bandit learners
/// sample their action from an independent stream seeded with `seed` and see
/// only that entry; full-information learners see the whole vector.
pub fn run_stream(
    config: LearnerConfig,
    adversary: &mut Adversary,
    horizon: usize,
    seed: u64,
) -> Result<StreamRun> {
    let mut learner = Learner::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut payoffs = Vec::with_capacity(horizon);
    let mut learner_total = 0.0;
    for t in 0..horizon {
        let w = learner.distribution().clone();
        let c = adversary.next(t, &w);
        learner_total += w.dot(&c);
        let feedback = if config.kind.is_bandit() {
            let played = w.sample(&mut rng);
            Feedback::Bandit { played, observed: c[played] }
        } else {
            Feedback::Full(CostVector::new(c.clone())?)
        };
        learner.observe(&feedback)?;
        payoffs.push(c);
    }
    Ok(StreamRun { payoffs, learner_total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::LearnerKind;

    #[test]
    fn streams_stay_in_the_unit_cube() {
        for kind in StreamKind::corpus() {
            let mut adversary = Adversary::new(kind, 5, 200, 1);
            let w = ActionDistribution::uniform(5);
            for t in 0..200 {
                let c = adversary.next(t, &w);
                assert_eq!(c.len(), 5);
                assert!(c.iter().all(|x| (0.0..=1.0).contains(x)), "{kind:?}");
            }
        }
    }

    #[test]
    fn planted_shifts_change_the_good_action() {
        let adversary = Adversary::new(StreamKind::PlantedShifts { shifts: 3 }, 4, 100, 9);
        assert_eq!(adversary.good.len(), 4);
        assert!(adversary.good.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn argmax_punisher_hits_the_heaviest_action() {
        let mut adversary = Adversary::new(StreamKind::ArgmaxPunisher, 3, 10, 0);
        let w = ActionDistribution::try_new(vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(adversary.next(0, &w), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn harness_is_deterministic() {
        let config = LearnerConfig::new(LearnerKind::LogBarrierBandit, 0.2, 3, 300);
        let run = |seed| {
            let mut adversary = Adversary::new(StreamKind::Uniform, 3, 300, 4);
            run_stream(config, &mut adversary, 300, seed).unwrap()
        };
        assert_eq!(run(1), run(1));
        assert_ne!(run(1).learner_total, run(2).learner_total);
    }
}
