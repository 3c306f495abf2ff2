//! Simplex-valued domain types shared by learners, games, and metrics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Tolerance used when validating that weights sum to one.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A mixed strategy: a point on the probability simplex over `d` actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionDistribution(Vec<f64>);

impl ActionDistribution {
    /// Validates an already-normalized weight vector.
    pub fn try_new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return domain("distribution needs at least one action");
        }
        if let Some(bad) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return domain(format!("invalid probability {bad}"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return domain(format!("weights sum to {total}, not 1"));
        }
        Ok(Self(weights))
    }

    pub fn uniform(d: usize) -> Self {
        assert!(d >= 1, "distribution needs at least one action");
        Self(vec![1.0 / d as f64; d])
    }

    pub fn point_mass(d: usize, action: usize) -> Self {
        assert!(action < d);
        let mut w = vec![0.0; d];
        w[action] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn min_weight(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute deviation of any coordinate from `1/d`.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let u = 1.0 / self.dim() as f64;
        self.0.iter().map(|w| (w - u).abs()).fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Inner product with an arbitrary (possibly signed) payoff slice.
    pub fn dot(&self, payoffs: &[f64]) -> f64 {
        debug_assert_eq!(self.dim(), payoffs.len());
        self.0.iter().zip(payoffs).map(|(w, c)| w * c).sum()
    }

    /// Draws an action index by inverting the cumulative distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (j, &w) in self.0.iter().enumerate() {
            if w > 0.0 {
                last_positive = j;
                acc += w;
                if u < acc {
                    return j;
                }
            }
        }
        // u landed in the rounding slack above the accumulated mass.
        last_positive
    }
}

/// Rescales nonnegative weights onto the simplex.
pub fn normalize(weights: &[f64]) -> Result<ActionDistribution> {
    if weights.is_empty() {
        return domain("cannot normalize an empty weight vector");
    }
    if let Some(bad) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return domain(format!("negative or non-finite weight {bad}"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(ActionDistribution(weights.iter().map(|w| w / total).collect()))
}

/// Convex combination `(1 - theta) * w + theta * uniform`.
pub fn mix_with_uniform(w: &ActionDistribution, theta: f64) -> Result<ActionDistribution> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("mixing weight {theta} outside [0, 1]"));
    }
    let floor = theta / w.dim() as f64;
    Ok(ActionDistribution(
        w.weights().iter().map(|x| (1.0 - theta) * x + floor).collect(),
    ))
}

/// Expected payoff `<w, c>` of a mixed strategy.
pub fn expected_value(w: &ActionDistribution, c: &CostVector) -> Result<f64> {
    if w.dim() != c.dim() {
        return domain(format!(
            "dimension mismatch: distribution has {} actions, cost vector {}",
            w.dim(),
            c.dim()
        ));
    }
    Ok(w.dot(c.values()))
}

/// Per-action payoffs normalized to `[0, 1]`. Holds costs or utilities; the
/// learner's mode decides how they are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("cost vector needs at least one entry");
        }
        if let Some(bad) = values.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return domain(format!("payoff {bad} outside [0, 1]"));
        }
        Ok(Self(values))
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub(crate) fn from_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|c| (-1e-12..=1.0 + 1e-12).contains(c)));
        Self(values)
    }
}

/// One action index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.0.len() != n {
            return domain(format!("profile has {} entries, game has {n} players", self.0.len()));
        }
        if let Some((i, a)) = self.0.iter().enumerate().find(|(_, a)| **a >= d) {
            return domain(format!("player {i} plays action {a}, only {d} exist"));
        }
        Ok(())
    }

    /// The profile with player `i` switched to `action`.
    pub fn with(&self, i: usize, action: usize) -> Self {
        let mut next = self.0.clone();
        next[i] = action;
        Self(next)
    }
}

/// `(lambda, mu)` smoothness together with the approximation slack `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    pub lambda: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl SmoothnessParams {
    /// Parameters for a cost-minimization game; requires `mu + epsilon < 1`.
    pub fn cost_game(lambda: f64, mu: f64, epsilon: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return domain(format!("lambda must be positive, got {lambda}"));
        }
        if !(0.0..1.0).contains(&mu) {
            return domain(format!("mu must lie in [0, 1), got {mu}"));
        }
        if !(epsilon >= 0.0) || mu + epsilon >= 1.0 {
            return domain(format!("need 0 <= epsilon < 1 - mu, got mu={mu}, epsilon={epsilon}"));
        }
        Ok(Self { lambda, mu, epsilon })
    }

    /// Parameters for a mechanism; only `lambda > 0`, `mu >= 0`, `epsilon >= 0`.
    pub fn mechanism(lambda: f64, mu: f64, epsilon: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(mu >= 0.0) || !(epsilon >= 0.0) {
            return domain(format!(
                "mechanism parameters out of range: lambda={lambda}, mu={mu}, epsilon={epsilon}"
            ));
        }
        Ok(Self { lambda, mu, epsilon })
    }
}

/// The `(epsilon, A(d, T))` pair a low-approximate-regret claim is made for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LarParams {
    pub epsilon: f64,
    pub a_budget: f64,
    pub shifting: bool,
    /// Number of comparator shifts, or total-variation mass for randomized sequences.
    pub shift_count: f64,
}

impl LarParams {
    pub fn fixed(epsilon: f64, a_budget: f64) -> Result<Self> {
        Self::shifting(epsilon, a_budget, 0.0).map(|p| Self { shifting: false, ..p })
    }

    pub fn shifting(epsilon: f64, a_budget: f64, shift_count: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return domain(format!("epsilon must be positive, got {epsilon}"));
        }
        if !(a_budget >= 0.0) || !(shift_count >= 0.0) {
            return domain("budget and shift count must be nonnegative");
        }
        Ok(Self { epsilon, a_budget, shifting: true, shift_count })
    }

    /// The additive slack `(1 + K) * A / epsilon`.
    pub fn slack(&self) -> f64 {
        (1.0 + self.shift_count) * self.a_budget / self.epsilon
    }
}
