//! Regret, approximate-regret certificates, comparators, and efficiency bounds.

mod bounds;
mod comparators;

pub use bounds::{
    dynamic_bound, efficiency_report, empirical_quantile, epsilon_from_hp_gamma, hp_bound, hp_check,
    hp_gamma, poa_bound_cost, poa_bound_utility, turnover_threshold, turnover_threshold_from_log,
    utility_price_of_anarchy, DynamicReport, DynamicSummary, EfficiencyReport, HpBound, HpCheck,
    ThresholdVariant, BOUND_TOLERANCE,
};
pub use comparators::{best_fixed_comparator, best_shifting_comparator, best_shifting_totals};

use serde::{Deserialize, Serialize};

use crate::engine::Trajectory;
use crate::error::{domain, Result};
use crate::games::Objective;
use crate::learners::Mode;
use crate::simplex::LarParams;

/// Residuals at or below this count as satisfied.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// Best single action in hindsight.
    Fixed,
    /// Best sequence with at most `K` changes.
    ShiftingK(u32),
    /// The trajectory's stable sequence, budgeted by its number of changes.
    Stable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarCertificate {
    pub player: usize,
    pub epsilon: f64,
    pub a_budget: f64,
    pub comparator: Comparator,
    /// `K` in the `(1 + K) A / eps` slack.
    pub shift_count: f64,
    pub learner_total: f64,
    pub comparator_total: f64,
    pub residual: f64,
    pub satisfied: bool,
}

/// Cost mode: `(1-eps) L - F - (1+K) A/eps`. Utility mode:
/// `F - (1+K) A/eps - (1+eps) L`. Nonpositive means the inequality holds.
pub fn lar_residual(mode: Mode, learner_total: f64, comparator_total: f64, params: &LarParams) -> f64 {
    let eps = params.epsilon;
    match mode {
        Mode::Cost => (1.0 - eps) * learner_total - comparator_total - params.slack(),
        Mode::Utility => comparator_total - params.slack() - (1.0 + eps) * learner_total,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn certify(
    player: usize,
    mode: Mode,
    learner_total: f64,
    comparator_total: f64,
    epsilon: f64,
    a_budget: f64,
    comparator: Comparator,
    shift_count: f64,
) -> Result<LarCertificate> {
    let params = LarParams::shifting(epsilon, a_budget, shift_count)?;
    let residual = lar_residual(mode, learner_total, comparator_total, &params);
    Ok(LarCertificate {
        player,
        epsilon,
        a_budget,
        comparator,
        shift_count,
        learner_total,
        comparator_total,
        residual,
        satisfied: residual <= CERTIFICATE_TOLERANCE,
    })
}

fn negate(history: &[Vec<f64>]) -> Vec<Vec<f64>> {
    history.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Best comparator total in `mode`: smallest cost or largest utility.
fn comparator_total(history: &[Vec<f64>], mode: Mode, comparator: Comparator) -> Result<f64> {
    let oriented;
    let h = match mode {
        Mode::Cost => history,
        Mode::Utility => {
            oriented = negate(history);
            &oriented
        }
    };
    let total = match comparator {
        Comparator::Fixed => best_fixed_comparator(h)?.1,
        Comparator::ShiftingK(k) => best_shifting_comparator(h, k as i64)?.1,
        Comparator::Stable => return domain("the stable comparator needs a trajectory"),
    };
    Ok(match mode {
        Mode::Cost => total,
        Mode::Utility => -total,
    })
}

/// Certificate for a learner that played `weights[t]` against `payoffs[t]`.
pub fn lar_certificate_for_stream(
    weights: &[Vec<f64>],
    payoffs: &[Vec<f64>],
    mode: Mode,
    params: &LarParams,
    comparator: Comparator,
) -> Result<LarCertificate> {
    if weights.len() != payoffs.len() {
        return domain(format!("{} distributions for {} payoff rows", weights.len(), payoffs.len()));
    }
    let learner_total = weights
        .iter()
        .zip(payoffs)
        .map(|(w, c)| w.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let f = comparator_total(payoffs, mode, comparator)?;
    let k = match comparator {
        Comparator::ShiftingK(k) => k as f64,
        _ => 0.0,
    };
    certify(0, mode, learner_total, f, params.epsilon, params.a_budget, comparator, k)
}

fn mode_of(trajectory: &Trajectory) -> Mode {
    match trajectory.objective() {
        Objective::CostMin => Mode::Cost,
        Objective::UtilityMax => Mode::Utility,
    }
}

/// Certificate for `player` over a whole trajectory. The shift count comes
/// from the comparator: 0 for `Fixed`, `K` for `ShiftingK`, and the number of
/// stable-sequence changes for `Stable`.
pub fn lar_certificate(
    trajectory: &Trajectory,
    player: usize,
    params: &LarParams,
    comparator: Comparator,
) -> Result<LarCertificate> {
    if player >= trajectory.players() || trajectory.horizon() == 0 {
        return domain(format!("no history for player {player}"));
    }
    let mode = mode_of(trajectory);
    let learner_total = trajectory.learner_total(player);
    let (f, k) = match comparator {
        Comparator::Stable => {
            let f = (0..trajectory.horizon())
                .map(|t| trajectory.payoff_vector(t, player)[trajectory.stable(t)[player]])
                .sum();
            (f, trajectory.shifts().k_changes[player] as f64)
        }
        Comparator::ShiftingK(k) => {
            (comparator_total(&trajectory.payoff_history(player), mode, comparator)?, k as f64)
        }
        Comparator::Fixed => (comparator_total(&trajectory.payoff_history(player), mode, comparator)?, 0.0),
    };
    certify(player, mode, learner_total, f, params.epsilon, params.a_budget, comparator, k)
}

/// Reduces a trajectory to its dynamic-bound summary.
pub fn dynamic_summary(trajectory: &Trajectory) -> DynamicSummary {
    let shifts = trajectory.shifts();
    DynamicSummary {
        mean_social: trajectory.mean_social(),
        mean_opt: trajectory.mean_opt(),
        rho: trajectory.measured_rho(),
        sum_k_changes: shifts.total_changes() as f64,
        sum_k_tv: shifts.total_tv(),
    }
}

/// `(1/T) (sum_t <w^t, c^t> - best fixed total)`, oriented so that positive
/// means the player did worse than the best fixed action.
pub fn individual_regret(trajectory: &Trajectory, player: usize) -> Result<f64> {
    let series = regret_series(trajectory, player)?;
    Ok(*series.last().expect("nonempty trajectory"))
}

/// Running average regret of `player` after each round.
pub fn regret_series(trajectory: &Trajectory, player: usize) -> Result<Vec<f64>> {
    if player >= trajectory.players() || trajectory.horizon() == 0 {
        return domain(format!("no history for player {player}"));
    }
    let sign = match mode_of(trajectory) {
        Mode::Cost => 1.0,
        Mode::Utility => -1.0,
    };
    let d = trajectory.actions();
    let mut totals = vec![0.0; d];
    let mut learner = 0.0;
    Ok((0..trajectory.horizon())
        .map(|t| {
            let c = trajectory.payoff_vector(t, player);
            let w = trajectory.distribution(t, player);
            for (acc, x) in totals.iter_mut().zip(c) {
                *acc += sign * x;
            }
            learner += sign * w.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
            let best = totals.iter().copied().fold(f64::INFINITY, f64::min);
            (learner - best) / (t + 1) as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_costs_leave_only_the_slack() {
        let weights = vec![vec![0.5, 0.5]; 20];
        let costs = vec![vec![0.0, 0.0]; 20];
        let params = LarParams::fixed(0.1, 2f64.ln()).unwrap();
        let cert = lar_certificate_for_stream(&weights, &costs, Mode::Cost, &params, Comparator::Fixed).unwrap();
        assert!((cert.residual + 2f64.ln() / 0.1).abs() < 1e-12);
        assert!(cert.satisfied);
        assert!(lar_certificate_for_stream(&weights[..3], &costs, Mode::Cost, &params, Comparator::Fixed).is_err());
    }

    #[test]
    fn utility_orientation() {
        let weights = vec![vec![0.0, 1.0]; 10];
        let utilities = vec![vec![1.0, 0.0]; 10];
        let params = LarParams::fixed(0.5, 1.0).unwrap();
        let cert =
            lar_certificate_for_stream(&weights, &utilities, Mode::Utility, &params, Comparator::Fixed).unwrap();
        assert_eq!(cert.comparator_total, 10.0);
        assert!((cert.residual - (10.0 - 2.0)).abs() < 1e-12);
        assert!(!cert.satisfied);
    }

    proptest! {
        #[test]
        fn residual_is_label_invariant(
            rows in prop::collection::vec((prop::collection::vec(0.01f64..1.0, 4), prop::collection::vec(0.0f64..=1.0, 4)), 1..30),
            perm_seed in any::<u64>(),
            k in 0u32..3,
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut perm: Vec<usize> = (0..4).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
            let weights: Vec<Vec<f64>> = rows.iter().map(|(w, _)| {
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect()
            }).collect();
            let costs: Vec<Vec<f64>> = rows.iter().map(|(_, c)| c.clone()).collect();
            let permute = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                m.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect()
            };
            let params = LarParams::fixed(0.2, 1.0).unwrap();
            for comparator in [Comparator::Fixed, Comparator::ShiftingK(k)] {
                let a = lar_certificate_for_stream(&weights, &costs, Mode::Cost, &params, comparator).unwrap();
                let b = lar_certificate_for_stream(&permute(&weights), &permute(&costs), Mode::Cost, &params, comparator).unwrap();
                prop_assert!((a.residual - b.residual).abs() <= 1e-9);
            }
        }
    }
}
