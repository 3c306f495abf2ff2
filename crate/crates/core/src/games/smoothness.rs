//! Brute-force smoothness checks.

use serde::{Deserialize, Serialize};

use super::{brute_force_opt, enumeration_size, for_each_profile, GameSpec, Objective, SMOOTHNESS_BUDGET};
use crate::error::{Error, Result};
use crate::simplex::{ActionProfile, SmoothnessParams};

/// Absolute slack allowed for floating-point accumulation.
const SLACK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessCertificate {
    pub params: SmoothnessParams,
    pub verified: bool,
    /// First violating pair `(s, s*)` in enumeration order.
    pub witness: Option<(ActionProfile, ActionProfile)>,
    /// Smallest `rhs - lhs` over the checked pairs (for mechanisms, under the
    /// best `s*`).
    pub worst_slack: f64,
    /// The deviation profile used for mechanisms.
    pub best_star: Option<ActionProfile>,
}

/// Cost games: checks `sum_i c_i(s*_i, s_-i) <= lambda C(s*) + mu C(s)` for
/// every pair. Mechanisms: searches for one `s*` with
/// `sum_i u_i(s*_i, s_-i) >= lambda OPT - mu sum_i p_i(s)` for every `s`.
pub fn verify_smoothness(game: &GameSpec, params: SmoothnessParams) -> Result<SmoothnessCertificate> {
    let needed = enumeration_size(game.actions(), 2 * game.players());
    if needed > SMOOTHNESS_BUDGET {
        return Err(Error::Budget { needed, limit: SMOOTHNESS_BUDGET });
    }
    match game.objective() {
        Objective::CostMin => Ok(verify_cost(game, params)),
        Objective::UtilityMax => verify_mechanism(game, params),
    }
}

fn deviation_sum(game: &GameSpec, s: &[usize], star: &[usize], scratch: &mut [usize], utility: bool) -> f64 {
    scratch.copy_from_slice(s);
    let mut total = 0.0;
    for i in 0..s.len() {
        scratch[i] = star[i];
        total += if utility { game.raw_utility(i, scratch) } else { game.payoff(i, scratch) };
        scratch[i] = s[i];
    }
    total
}

fn profiles(game: &GameSpec) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    for_each_profile(game.players(), game.actions(), |s| all.push(s.to_vec()));
    all
}

fn verify_cost(game: &GameSpec, params: SmoothnessParams) -> SmoothnessCertificate {
    let all = profiles(game);
    let social: Vec<f64> = all.iter().map(|s| game.social_value(s)).collect();
    let mut scratch = vec![0; game.players()];
    let mut worst_slack = f64::INFINITY;
    let mut witness = None;
    for (si, s) in all.iter().enumerate() {
        for (ti, star) in all.iter().enumerate() {
            let lhs = deviation_sum(game, s, star, &mut scratch, false);
            let slack = params.lambda * social[ti] + params.mu * social[si] - lhs;
            if slack < worst_slack {
                worst_slack = slack;
            }
            if slack < -SLACK_TOLERANCE && witness.is_none() {
                witness = Some((ActionProfile(s.clone()), ActionProfile(star.clone())));
            }
        }
    }
    SmoothnessCertificate {
        params,
        verified: witness.is_none(),
        witness,
        worst_slack,
        best_star: None,
    }
}

fn verify_mechanism(game: &GameSpec, params: SmoothnessParams) -> Result<SmoothnessCertificate> {
    let (_, opt) = brute_force_opt(game)?;
    let all = profiles(game);
    let payments: Vec<f64> = all.iter().map(|s| game.total_payment(s)).collect();
    let mut scratch = vec![0; game.players()];
    // (slack, star, first violating s) for the best candidate s*.
    let mut best: Option<(f64, usize, Option<usize>)> = None;
    for (ti, star) in all.iter().enumerate() {
        let mut worst = f64::INFINITY;
        let mut violation = None;
        for (si, s) in all.iter().enumerate() {
            let lhs = deviation_sum(game, s, star, &mut scratch, true);
            let slack = lhs - (params.lambda * opt - params.mu * payments[si]);
            if slack < worst {
                worst = slack;
            }
            if slack < -SLACK_TOLERANCE && violation.is_none() {
                violation = Some(si);
            }
        }
        if best.as_ref().is_none_or(|(b, _, _)| worst > *b) {
            best = Some((worst, ti, violation));
        }
    }
    let (worst_slack, ti, violation) = best.expect("at least one profile exists");
    let star = ActionProfile(all[ti].clone());
    Ok(SmoothnessCertificate {
        params,
        verified: violation.is_none(),
        witness: violation.map(|si| (ActionProfile(all[si].clone()), star.clone())),
        worst_slack,
        best_star: Some(star),
    })
}
