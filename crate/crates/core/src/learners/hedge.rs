//! Exponential-weights updates: plain, optimistic, noisy, and doubling-tuned Hedge.

use crate::error::{domain, Error, Result};
use crate::simplex::{mix_with_uniform, normalize, ActionDistribution};

/// `w'_j ∝ w_j * exp(-eta * loss_j)`. Losses are costs in `[0, 1]`, or
/// negated utilities in `[-1, 0]`.
pub fn hedge_update(w: &ActionDistribution, losses: &[f64], eta: f64) -> Result<ActionDistribution> {
    if !(eta > 0.0) {
        return domain(format!("learning rate must be positive, got {eta}"));
    }
    tilt(w, losses, eta)
}

// Shared by every Hedge variant; also accepts eta = 0 (tuned Hedge with d = 1).
pub(crate) fn tilt(w: &ActionDistribution, losses: &[f64], eta: f64) -> Result<ActionDistribution> {
    if w.dim() != losses.len() {
        return domain(format!(
            "dimension mismatch: {} weights, {} losses",
            w.dim(),
            losses.len()
        ));
    }
    // Shifting by the smallest loss leaves the normalized result unchanged and
    // keeps the largest factor at exactly 1.
    let floor = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tilted: Vec<f64> = w
        .weights()
        .iter()
        .zip(losses)
        .map(|(wj, lj)| wj * (-eta * (lj - floor)).exp())
        .collect();
    normalize(&tilted).map_err(|e| match e {
        Error::ZeroMass => Error::Numerical("exponential update lost all mass".into()),
        other => other,
    })
}

/// One Optimistic Hedge step from the secondary sequence `g`. The loss just
/// observed doubles as the prediction for the next round.
///
/// Returns `(g_next, w_next)`.
pub fn optimistic_hedge_update(
    g: &ActionDistribution,
    losses: &[f64],
    eta: f64,
) -> Result<(ActionDistribution, ActionDistribution)> {
    if !(eta > 0.0 && eta < 0.25) {
        return Err(Error::Config(format!(
            "optimistic hedge needs 0 < eta < 1/4, got {eta}"
        )));
    }
    let g_next = tilt(g, losses, eta)?;
    let w_next = tilt(&g_next, losses, eta)?;
    Ok((g_next, w_next))
}

/// Noisy Hedge: tilt the played distribution `w`, normalize to get `g_next`,
/// then mix a `theta` fraction of uniform noise back in.
///
/// Returns `(g_next, w_next)`.
pub fn noisy_hedge_update(
    w: &ActionDistribution,
    losses: &[f64],
    eta: f64,
    theta: f64,
) -> Result<(ActionDistribution, ActionDistribution)> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("mixing weight {theta} outside [0, 1]"));
    }
    let g_next = hedge_update(w, losses, eta)?;
    let w_next = mix_with_uniform(&g_next, theta)?;
    Ok((g_next, w_next))
}

/// Learning rate of doubling epoch `k`: `sqrt(ln d / 2^k)`.
pub fn tuned_learning_rate(d: usize, epoch: u32) -> f64 {
    ((d as f64).ln() / 2f64.powi(epoch as i32)).sqrt()
}

/// Bookkeeping for Hedge with doubling-trick learning-rate tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingSchedule {
    pub epoch: u32,
    pub epoch_cost: f64,
}

impl DoublingSchedule {
    pub fn new() -> Self {
        Self { epoch: 0, epoch_cost: 0.0 }
    }

    pub fn budget(&self) -> f64 {
        2f64.powi(self.epoch as i32)
    }
}

impl Default for DoublingSchedule {
    fn default() -> Self {
        Self::new()
    }
}

/// One tuned-Hedge round: charge the expected loss to the epoch, take a Hedge
/// step at the epoch rate, and restart at uniform once the epoch budget `2^k`
/// is exceeded.
pub fn tuned_hedge_step(
    schedule: &mut DoublingSchedule,
    w: &ActionDistribution,
    losses: &[f64],
) -> Result<ActionDistribution> {
    let eta = tuned_learning_rate(w.dim(), schedule.epoch);
    let next = tilt(w, losses, eta)?;
    schedule.epoch_cost += w.dot(losses).abs();
    if schedule.epoch_cost > schedule.budget() {
        schedule.epoch += 1;
        schedule.epoch_cost = 0.0;
        return Ok(ActionDistribution::uniform(w.dim()));
    }
    Ok(next)
}
