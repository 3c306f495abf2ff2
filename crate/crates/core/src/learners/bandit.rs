//! Log-barrier mirror descent with importance-weighted cost estimates.
//!
//! Each round the learner sees only the payoff of the action it played. The
//! payoff is turned into an unbiased estimate of the full vector, and a
//! mirror-descent step under the log barrier `R(w) = -sum ln w_j` gives
//!
//! ```text
//! w'_j = w_j / (1 + eta * w_j * est_j + gamma * w_j)
//! ```
//!
//! where the scalar `gamma` is the unique root that puts `w'` back on the
//! simplex: `gamma <= 0` for costs, `gamma >= 0` for utilities.

use crate::error::{domain, Error, Result};
use crate::learners::Mode;
use crate::simplex::{normalize, ActionDistribution};

/// Bisection stops once the weights sum to one within this tolerance.
pub const GAMMA_TOLERANCE: f64 = 1e-12;
/// Hard cap on bisection (and bracket expansion) steps.
pub const GAMMA_MAX_ITERATIONS: usize = 200;
// A result this far from the simplex is reported as a solver failure.
const GAMMA_ACCEPT: f64 = 1e-10;

/// `est_j = observed / w_j` for the played action, 0 elsewhere.
pub fn importance_weighted_estimate(
    played: usize,
    observed: f64,
    w: &ActionDistribution,
) -> Result<Vec<f64>> {
    if played >= w.dim() {
        return domain(format!("played action {played} out of range for {} actions", w.dim()));
    }
    if !(0.0..=1.0).contains(&observed) {
        return domain(format!("observed payoff {observed} outside [0, 1]"));
    }
    let p = w.weights()[played];
    if p <= 0.0 {
        return Err(Error::DivisionDomain(played));
    }
    let mut estimate = vec![0.0; w.dim()];
    estimate[played] = observed / p;
    Ok(estimate)
}

/// Total mass after the update for a candidate normalizer.
fn post_update_mass(w: &[f64], played: usize, tilt: f64, gamma: f64) -> f64 {
    w.iter()
        .enumerate()
        .map(|(j, &wj)| {
            let extra = if j == played { tilt } else { 0.0 };
            wj / (1.0 + extra + gamma * wj)
        })
        .sum()
}

/// Finds the normalizer `gamma` for a tilt on the played coordinate.
///
/// `tilt` is `eta * w_played * est_played`: nonnegative for costs (root in
/// `(-1/max_j w_j, 0]`), nonpositive for utilities (root in `[0, inf)`).
pub fn solve_normalizer_gamma(w: &ActionDistribution, played: usize, tilt: f64) -> Result<f64> {
    let weights = w.weights();
    if played >= weights.len() {
        return domain(format!("played action {played} out of range"));
    }
    if !tilt.is_finite() || tilt <= -1.0 {
        return domain(format!("tilt {tilt} would make a denominator nonpositive"));
    }
    if tilt == 0.0 || weights[played] == 0.0 {
        return Ok(0.0);
    }
    let excess = |gamma: f64| post_update_mass(weights, played, tilt, gamma) - 1.0;

    let (mut lo, mut hi) = if tilt > 0.0 {
        let w_max = weights.iter().copied().fold(0.0, f64::max);
        (-1.0 / w_max + 1e-15, 0.0)
    } else {
        let mut hi = 1.0;
        let mut steps = 0;
        while excess(hi) > 0.0 {
            hi *= 2.0;
            steps += 1;
            if steps > GAMMA_MAX_ITERATIONS {
                return Err(Error::Numerical(format!(
                    "could not bracket the utility normalizer for tilt {tilt}"
                )));
            }
        }
        (0.0, hi)
    };
    let (f_lo, f_hi) = (excess(lo), excess(hi));
    if !(f_lo >= 0.0 && f_hi <= 0.0) {
        return Err(Error::Numerical(format!(
            "normalizer not bracketed: S(lo)-1={f_lo}, S(hi)-1={f_hi}"
        )));
    }

    // S is strictly decreasing in gamma, so plain bisection converges.
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..GAMMA_MAX_ITERATIONS {
        if best.1.abs() <= GAMMA_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = excess(mid);
        if f.abs() < best.1.abs() {
            best = (mid, f);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() > GAMMA_ACCEPT {
        return Err(Error::Numerical(format!(
            "normalizer bisection stalled with |S-1| = {}",
            best.1.abs()
        )));
    }
    Ok(best.0)
}

/// Applies `w'_j = w_j / (1 + [j = played] * tilt + gamma * w_j)` without renormalizing.
pub fn apply_normalizer(w: &ActionDistribution, played: usize, tilt: f64, gamma: f64) -> Vec<f64> {
    w.weights()
        .iter()
        .enumerate()
        .map(|(j, &wj)| {
            let extra = if j == played { tilt } else { 0.0 };
            wj / (1.0 + extra + gamma * wj)
        })
        .collect()
}

/// One bandit round: importance-weight the observed payoff, take the
/// log-barrier mirror step, and renormalize.
pub fn log_barrier_bandit_update(
    w: &ActionDistribution,
    played: usize,
    observed: f64,
    eta: f64,
    mode: Mode,
) -> Result<ActionDistribution> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Config(format!("log-barrier bandit needs 0 < eta < 1, got {eta}")));
    }
    let estimate = importance_weighted_estimate(played, observed, w)?;
    let sign = match mode {
        Mode::Cost => 1.0,
        Mode::Utility => -1.0,
    };
    let tilt = sign * eta * w.weights()[played] * estimate[played];
    let gamma = solve_normalizer_gamma(w, played, tilt)?;
    normalize(&apply_normalizer(w, played, tilt, gamma))
}
