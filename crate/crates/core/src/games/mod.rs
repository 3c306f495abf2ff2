//! Finite game and mechanism families with exact payoff evaluation and
//! brute-force optimization.
//!
//! Every family exposes learner-facing payoffs in `[0, 1]`: costs for the
//! congestion families, utilities for the auctions. Mechanisms additionally
//! report raw `(value, payment)` so welfare and revenue stay available.

mod smoothness;

pub use smoothness::{verify_smoothness, SmoothnessCertificate};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::simplex::{ActionDistribution, ActionProfile, CostVector};

/// Limit on opponent profiles enumerated for an exact expectation.
pub const EXPECTATION_BUDGET: u128 = 1_000_000;
/// Limit on profiles enumerated to find the optimum.
pub const OPT_BUDGET: u128 = 10_000_000;
/// Limit on `(s, s*)` pairs enumerated by the smoothness check.
pub const SMOOTHNESS_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    CostMin,
    UtilityMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    LoadBalancing,
    AffineCongestion,
    FirstPriceAuction,
    AllPayAuction,
}

/// Resource latency `a * load + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resource {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GameKind {
    /// Each player picks a bin; cost is `weight[i][bin] * load(bin) / n`.
    LoadBalancing { base_weights: Vec<f64>, weights: Vec<Vec<f64>> },
    /// Each action is a set of resources; cost is the summed latency divided
    /// by `scale`, the worst cost any player can face.
    AffineCongestion { resources: Vec<Resource>, strategies: Vec<Vec<Vec<usize>>>, scale: f64 },
    /// Single-item auction; action `k` bids `value * bid_fractions[k]`.
    Auction { all_pay: bool, values: Vec<f64>, bid_fractions: Vec<f64>, min_value: f64 },
}

/// An immutable game instance with `n` players and `d` actions each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    n: usize,
    d: usize,
    kind: GameKind,
}

impl GameSpec {
    /// Load balancing over `base_weights.len()` bins; player `i` starts with
    /// bin weights `base_weights` (use all ones for identical machines).
    pub fn load_balancing(n: usize, base_weights: Vec<f64>) -> Result<Self> {
        let weights = vec![base_weights.clone(); n];
        Self::load_balancing_with(n, base_weights, weights)
    }

    pub fn load_balancing_with(
        n: usize,
        base_weights: Vec<f64>,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let d = base_weights.len();
        if n == 0 || d == 0 {
            return domain("load balancing needs at least one player and one bin");
        }
        let in_range = |w: &[f64]| w.iter().all(|x| *x > 0.0 && *x <= 1.0);
        if !in_range(&base_weights) || weights.len() != n {
            return domain("bin weights must lie in (0, 1], one row per player");
        }
        if weights.iter().any(|row| row.len() != d || !in_range(row)) {
            return domain("every player needs one weight in (0, 1] per bin");
        }
        Ok(Self { n, d, kind: GameKind::LoadBalancing { base_weights, weights } })
    }

    /// Atomic congestion game with affine latencies. `strategies[i][k]` is
    /// the resource set of player `i`'s action `k`.
    pub fn affine_congestion(resources: Vec<Resource>, strategies: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = strategies.len();
        if n == 0 || resources.is_empty() {
            return domain("congestion game needs players and resources");
        }
        let d = strategies[0].len();
        if d == 0 || strategies.iter().any(|s| s.len() != d) {
            return domain("every player needs the same positive number of strategies");
        }
        if resources.iter().any(|r| !(r.a >= 0.0 && r.b >= 0.0)) {
            return domain("latency coefficients must be nonnegative");
        }
        for set in strategies.iter().flatten() {
            if set.iter().any(|e| *e >= resources.len()) {
                return domain("strategy references an unknown resource");
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != set.len() {
                return domain("strategy lists a resource twice");
            }
        }
        let scale = strategies
            .iter()
            .flatten()
            .map(|set| set.iter().map(|&e| resources[e].a * n as f64 + resources[e].b).sum::<f64>())
            .fold(0.0, f64::max);
        if !(scale > 0.0) {
            return domain("congestion game has identically zero latency");
        }
        Ok(Self { n, d, kind: GameKind::AffineCongestion { resources, strategies, scale } })
    }

    pub fn first_price_auction(values: Vec<f64>, bid_fractions: Vec<f64>, min_value: f64) -> Result<Self> {
        Self::auction(false, values, bid_fractions, min_value)
    }

    pub fn all_pay_auction(values: Vec<f64>, bid_fractions: Vec<f64>, min_value: f64) -> Result<Self> {
        Self::auction(true, values, bid_fractions, min_value)
    }

    fn auction(all_pay: bool, values: Vec<f64>, bid_fractions: Vec<f64>, min_value: f64) -> Result<Self> {
        let (n, d) = (values.len(), bid_fractions.len());
        if n == 0 || d == 0 {
            return domain("auction needs bidders and a bid grid");
        }
        if !(0.0..=1.0).contains(&min_value) {
            return domain(format!("minimum value {min_value} outside [0, 1]"));
        }
        if values.iter().any(|v| !(*v >= min_value && *v <= 1.0 && *v > 0.0)) {
            return domain(format!("values must lie in [{min_value}, 1] and be positive"));
        }
        if bid_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return domain("bid fractions must lie in [0, 1]");
        }
        Ok(Self { n, d, kind: GameKind::Auction { all_pay, values, bid_fractions, min_value } })
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn actions(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &GameKind {
        &self.kind
    }

    pub fn family(&self) -> Family {
        match &self.kind {
            GameKind::LoadBalancing { .. } => Family::LoadBalancing,
            GameKind::AffineCongestion { .. } => Family::AffineCongestion,
            GameKind::Auction { all_pay: false, .. } => Family::FirstPriceAuction,
            GameKind::Auction { all_pay: true, .. } => Family::AllPayAuction,
        }
    }

    pub fn objective(&self) -> Objective {
        match self.kind {
            GameKind::Auction { .. } => Objective::UtilityMax,
            _ => Objective::CostMin,
        }
    }

    /// Whether a closed-form expectation exists (skips enumeration).
    pub fn has_closed_form_expectation(&self) -> bool {
        matches!(self.kind, GameKind::LoadBalancing { .. })
    }

    /// Learner-facing payoff of player `i` under `profile`, in `[0, 1]`.
    pub fn payoff(&self, i: usize, profile: &[usize]) -> f64 {
        match &self.kind {
            GameKind::LoadBalancing { weights, .. } => {
                let bin = profile[i];
                let load = profile.iter().filter(|b| **b == bin).count();
                weights[i][bin] * load as f64 / self.n as f64
            }
            GameKind::AffineCongestion { resources, strategies, scale } => {
                let mine = &strategies[i][profile[i]];
                let latency: f64 = mine
                    .iter()
                    .map(|&e| {
                        let load = profile
                            .iter()
                            .enumerate()
                            .filter(|(j, a)| strategies[*j][**a].contains(&e))
                            .count();
                        resources[e].a * load as f64 + resources[e].b
                    })
                    .sum();
                latency / scale
            }
            GameKind::Auction { all_pay, .. } => {
                let (value, payment) = self.outcome(i, profile);
                let utility = value - payment;
                // All-pay losers pay, so raw utility ranges over [-1, 1].
                if *all_pay {
                    (utility + 1.0) / 2.0
                } else {
                    utility
                }
            }
        }
    }

    /// `(value, payment)` of player `i`; `(cost, 0)` for cost games.
    pub fn outcome(&self, i: usize, profile: &[usize]) -> (f64, f64) {
        match &self.kind {
            GameKind::Auction { all_pay, values, bid_fractions, .. } => {
                let bid = |j: usize| values[j] * bid_fractions[profile[j]];
                // Highest bid wins; ties go to the lowest index.
                let mut winner = 0;
                for j in 1..self.n {
                    if bid(j) > bid(winner) {
                        winner = j;
                    }
                }
                let value = if i == winner { values[i] } else { 0.0 };
                let payment = if i == winner || *all_pay { bid(i) } else { 0.0 };
                (value, payment)
            }
            _ => (self.payoff(i, profile), 0.0),
        }
    }

    /// Raw utility `value - payment` (mechanisms) or negated cost.
    pub fn raw_utility(&self, i: usize, profile: &[usize]) -> f64 {
        match self.objective() {
            Objective::UtilityMax => {
                let (v, p) = self.outcome(i, profile);
                v - p
            }
            Objective::CostMin => -self.payoff(i, profile),
        }
    }

    pub fn total_payment(&self, profile: &[usize]) -> f64 {
        (0..self.n).map(|i| self.outcome(i, profile).1).sum()
    }

    /// Social cost `sum_i cost_i` or social welfare `sum_i value_i`.
    pub fn social_value(&self, profile: &[usize]) -> f64 {
        match self.objective() {
            Objective::CostMin => (0..self.n).map(|i| self.payoff(i, profile)).sum(),
            Objective::UtilityMax => (0..self.n).map(|i| self.outcome(i, profile).0).sum(),
        }
    }

    /// Replaces player `i`'s private parameters as a newly arrived player.
    pub fn redraw_player<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) {
        match &mut self.kind {
            GameKind::LoadBalancing { base_weights, weights } => {
                let mut row = base_weights.clone();
                row.shuffle(rng);
                weights[i] = row;
            }
            GameKind::Auction { values, min_value, .. } => {
                let lo = min_value.max(f64::MIN_POSITIVE);
                values[i] = if lo < 1.0 { rng.gen_range(lo..=1.0) } else { 1.0 };
            }
            GameKind::AffineCongestion { .. } => {}
        }
    }

    /// Smoothness parameters valid for every instance reachable by redraws,
    /// when the family has a closed-form certificate.
    ///
    /// Affine congestion is `(5/3, 1/3)`. Load balancing with player weights
    /// in `[b_min, 1]` inherits `(5/(3 b_min), 1/(3 b_min))` by comparing to
    /// the unweighted game.
    pub fn family_smoothness(&self) -> Option<(f64, f64)> {
        match &self.kind {
            GameKind::AffineCongestion { .. } => Some((5.0 / 3.0, 1.0 / 3.0)),
            GameKind::LoadBalancing { base_weights, .. } => {
                let b_min = base_weights.iter().copied().fold(1.0, f64::min);
                Some((5.0 / (3.0 * b_min), 1.0 / (3.0 * b_min)))
            }
            GameKind::Auction { all_pay: false, .. } => Some((1.0 - (-1f64).exp(), 1.0)),
            GameKind::Auction { all_pay: true, .. } => Some((0.5, 1.0)),
        }
    }
}

/// Calls `f` on every profile in `[0, d)^n` in lexicographic order.
pub(crate) fn for_each_profile(n: usize, d: usize, mut f: impl FnMut(&[usize])) {
    let mut profile = vec![0usize; n];
    loop {
        f(&profile);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            profile[k] += 1;
            if profile[k] < d {
                break;
            }
            profile[k] = 0;
        }
    }
}

pub(crate) fn enumeration_size(d: usize, exponent: usize) -> u128 {
    (d as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX)
}

/// Entry `[i][x]` is player `i`'s payoff for switching to `x` against `s_{-i}`.
pub fn realized_cost_vectors(game: &GameSpec, profile: &ActionProfile) -> Result<Vec<CostVector>> {
    profile.validate(game.n, game.d)?;
    let mut scratch = profile.0.clone();
    Ok((0..game.n)
        .map(|i| {
            let own = scratch[i];
            let row = (0..game.d)
                .map(|x| {
                    scratch[i] = x;
                    game.payoff(i, &scratch)
                })
                .collect();
            scratch[i] = own;
            CostVector::from_unchecked(row)
        })
        .collect())
}

/// Exact `E_{s_{-i} ~ w_{-i}}[payoff_i(x, s_{-i})]` for every action `x`.
pub fn expected_cost_vector(
    game: &GameSpec,
    distributions: &[ActionDistribution],
    i: usize,
) -> Result<CostVector> {
    check_distributions(game, distributions, i)?;
    if let GameKind::LoadBalancing { weights, .. } = &game.kind {
        let n = game.n as f64;
        let row = (0..game.d)
            .map(|b| {
                let others: f64 = (0..game.n)
                    .filter(|j| *j != i)
                    .map(|j| distributions[j].weights()[b])
                    .sum();
                weights[i][b] * (1.0 + others) / n
            })
            .collect();
        return Ok(CostVector::from_unchecked(row));
    }
    expected_cost_vector_by_enumeration(game, distributions, i)
}

/// The enumeration path of [`expected_cost_vector`], available for every family.
pub fn expected_cost_vector_by_enumeration(
    game: &GameSpec,
    distributions: &[ActionDistribution],
    i: usize,
) -> Result<CostVector> {
    check_distributions(game, distributions, i)?;
    let needed = enumeration_size(game.d, game.n - 1);
    if needed > EXPECTATION_BUDGET {
        return Err(Error::Budget { needed, limit: EXPECTATION_BUDGET });
    }
    let mut expected = vec![0.0; game.d];
    let mut full = vec![0usize; game.n];
    for_each_profile(game.n - 1, game.d, |others| {
        let mut prob = 1.0;
        for (slot, &a) in others.iter().enumerate() {
            let j = if slot < i { slot } else { slot + 1 };
            prob *= distributions[j].weights()[a];
            full[j] = a;
        }
        if prob == 0.0 {
            return;
        }
        for (x, e) in expected.iter_mut().enumerate() {
            full[i] = x;
            *e += prob * game.payoff(i, &full);
        }
    });
    for e in &mut expected {
        *e = e.clamp(0.0, 1.0);
    }
    Ok(CostVector::from_unchecked(expected))
}

fn check_distributions(game: &GameSpec, distributions: &[ActionDistribution], i: usize) -> Result<()> {
    if distributions.len() != game.n || i >= game.n {
        return domain(format!(
            "need {} distributions and a player below that, got {} and {i}",
            game.n,
            distributions.len()
        ));
    }
    if distributions.iter().any(|w| w.dim() != game.d) {
        return domain("distribution dimension differs from the game's action count");
    }
    Ok(())
}

/// Exhaustive optimum of the social objective: minimum social cost or
/// maximum welfare. Ties go to the lexicographically smallest profile.
pub fn brute_force_opt(game: &GameSpec) -> Result<(ActionProfile, f64)> {
    let needed = enumeration_size(game.d, game.n);
    if needed > OPT_BUDGET {
        return Err(Error::Budget { needed, limit: OPT_BUDGET });
    }
    let maximize = game.objective() == Objective::UtilityMax;
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_profile(game.n, game.d, |s| {
        let value = game.social_value(s);
        let better = match &best {
            None => true,
            Some((_, b)) if maximize => value > *b,
            Some((_, b)) => value < *b,
        };
        if better {
            best = Some((s.to_vec(), value));
        }
    });
    let (profile, value) = best.expect("at least one profile exists");
    Ok((ActionProfile(profile), value))
}

/// Social cost (cost games) or social welfare (mechanisms) of a profile.
pub fn social_objective(game: &GameSpec, profile: &ActionProfile) -> Result<f64> {
    profile.validate(game.n, game.d)?;
    Ok(game.social_value(profile.actions()))
}

/// Action maximizing (utility) or minimizing (cost) player `i`'s payoff with
/// the others held at `profile`; lowest index on ties.
pub fn best_response(game: &GameSpec, profile: &[usize], i: usize) -> usize {
    let maximize = game.objective() == Objective::UtilityMax;
    let mut scratch = profile.to_vec();
    let mut best = (0, f64::NAN);
    for x in 0..game.d {
        scratch[i] = x;
        let v = game.payoff(i, &scratch);
        let better = best.1.is_nan() || if maximize { v > best.1 } else { v < best.1 };
        if better {
            best = (x, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn two_by_two() -> GameSpec {
        GameSpec::load_balancing(2, vec![1.0, 1.0]).unwrap()
    }

    fn desk_auction(all_pay: bool) -> GameSpec {
        let grid = vec![0.0, 0.25, 0.5, 0.75];
        if all_pay {
            GameSpec::all_pay_auction(vec![1.0, 0.5], grid, 0.0).unwrap()
        } else {
            GameSpec::first_price_auction(vec![1.0, 0.5], grid, 0.0).unwrap()
        }
    }

    #[test]
    fn load_balancing_deviation_costs() {
        let rows = realized_cost_vectors(&two_by_two(), &ActionProfile(vec![0, 1])).unwrap();
        assert_eq!(rows[1].values(), &[1.0, 0.5]);
        assert_eq!(rows[0].values(), &[0.5, 1.0]);
        assert!(realized_cost_vectors(&two_by_two(), &ActionProfile(vec![0, 2])).is_err());
    }

    #[test]
    fn single_player_sees_intrinsic_costs() {
        let game = GameSpec::load_balancing(1, vec![0.3, 0.9, 0.6]).unwrap();
        for a in 0..3 {
            let rows = realized_cost_vectors(&game, &ActionProfile(vec![a])).unwrap();
            assert_eq!(rows[0].values(), &[0.3, 0.9, 0.6]);
        }
        let (profile, value) = brute_force_opt(&game).unwrap();
        assert_eq!((profile.0, value), (vec![0], 0.3));
        assert_eq!(social_objective(&game, &ActionProfile(vec![1])).unwrap(), 0.9);
    }

    #[test]
    fn first_price_rule() {
        let game = desk_auction(false);
        // Bids (0.5, 0.25) for values (1, 0.5).
        let s = [2, 2];
        assert_eq!(game.outcome(0, &s), (1.0, 0.5));
        assert_eq!(game.outcome(1, &s), (0.0, 0.0));
        assert_eq!(game.payoff(0, &s), 0.5);
        assert_eq!(game.payoff(1, &s), 0.0);
        let rows = realized_cost_vectors(&game, &ActionProfile(s.to_vec())).unwrap();
        // Bidder 0 bidding 0.25 ties bidder 1 and wins on index.
        assert_eq!(rows[0].values(), &[0.0, 0.75, 0.5, 0.25]);
        assert_eq!(rows[1].values(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn auction_opt_awards_the_high_value() {
        let (_, welfare) = brute_force_opt(&desk_auction(false)).unwrap();
        assert_eq!(welfare, 1.0);
    }

    #[test]
    fn load_balancing_opt_and_social_cost() {
        let game = two_by_two();
        let (profile, value) = brute_force_opt(&game).unwrap();
        assert_eq!((profile.0, value), (vec![0, 1], 1.0));
        assert_eq!(social_objective(&game, &ActionProfile(vec![1, 1])).unwrap(), 2.0);
        assert_eq!(social_objective(&game, &ActionProfile(vec![1, 0])).unwrap(), 1.0);
    }

    #[test]
    fn expectation_examples() {
        let game = two_by_two();
        let uniform = vec![ActionDistribution::uniform(2); 2];
        for i in 0..2 {
            assert_eq!(expected_cost_vector(&game, &uniform, i).unwrap().values(), &[0.75, 0.75]);
        }
        let game = GameSpec::load_balancing(3, vec![1.0, 0.7, 0.4]).unwrap();
        let dists = vec![
            ActionDistribution::try_new(vec![0.2, 0.5, 0.3]).unwrap(),
            ActionDistribution::try_new(vec![0.6, 0.1, 0.3]).unwrap(),
            ActionDistribution::try_new(vec![0.0, 0.0, 1.0]).unwrap(),
        ];
        for i in 0..3 {
            let closed = expected_cost_vector(&game, &dists, i).unwrap();
            let enumerated = expected_cost_vector_by_enumeration(&game, &dists, i).unwrap();
            for (a, b) in closed.values().iter().zip(enumerated.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn expectation_budget_is_enforced() {
        let resources = vec![Resource { a: 1.0, b: 0.0 }; 2];
        let strategies = vec![vec![vec![0], vec![1], vec![0, 1], vec![]]; 12];
        let game = GameSpec::affine_congestion(resources, strategies).unwrap();
        let dists = vec![ActionDistribution::uniform(4); 12];
        assert!(matches!(
            expected_cost_vector(&game, &dists, 0),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn mechanism_accounting_identity() {
        for all_pay in [false, true] {
            let game = desk_auction(all_pay);
            for_each_profile(2, 4, |s| {
                for i in 0..2 {
                    let (v, p) = game.outcome(i, s);
                    assert_eq!(game.raw_utility(i, s) + p, v);
                    assert!((0.0..=1.0).contains(&game.payoff(i, s)));
                }
            });
        }
    }

    #[test]
    fn redraws_stay_in_family() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut game = GameSpec::load_balancing(3, vec![1.0, 0.8, 0.6]).unwrap();
        game.redraw_player(1, &mut rng);
        let GameKind::LoadBalancing { weights, .. } = game.kind() else { unreachable!() };
        let mut row = weights[1].clone();
        row.sort_by(f64::total_cmp);
        assert_eq!(row, vec![0.6, 0.8, 1.0]);

        let mut auction = GameSpec::first_price_auction(vec![0.5, 0.5], vec![0.0, 0.5], 0.2).unwrap();
        for _ in 0..100 {
            auction.redraw_player(0, &mut rng);
            let GameKind::Auction { values, .. } = auction.kind() else { unreachable!() };
            assert!((0.2..=1.0).contains(&values[0]));
        }
    }

    fn small_congestion() -> impl Strategy<Value = GameSpec> {
        (2usize..4, 2usize..4, prop::collection::vec((0.0f64..2.0, 0.0f64..1.0), 3), any::<u64>())
            .prop_map(|(n, d, coeffs, seed)| {
                use rand::Rng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let resources: Vec<Resource> =
                    coeffs.iter().map(|(a, b)| Resource { a: *a + 0.1, b: *b }).collect();
                let strategies = (0..n)
                    .map(|_| {
                        (0..d)
                            .map(|_| (0..3).filter(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
                            .map(|s: Vec<usize>| if s.is_empty() { vec![0] } else { s })
                            .collect()
                    })
                    .collect();
                GameSpec::affine_congestion(resources, strategies).unwrap()
            })
    }

    proptest! {
        #[test]
        fn deviation_diagonal_is_own_cost(game in small_congestion(), seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<usize> = (0..game.players()).map(|_| rng.gen_range(0..game.actions())).collect();
            let rows = realized_cost_vectors(&game, &ActionProfile(s.clone())).unwrap();
            for i in 0..game.players() {
                prop_assert_eq!(rows[i].values()[s[i]], game.payoff(i, &s));
                prop_assert!(rows[i].values().iter().all(|c| (0.0..=1.0).contains(c)));
            }
        }

        #[test]
        fn point_masses_reduce_expectation_to_realized(game in small_congestion(), seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (n, d) = (game.players(), game.actions());
            let s: Vec<usize> = (0..n).map(|_| rng.gen_range(0..d)).collect();
            let dists: Vec<_> = s.iter().map(|a| ActionDistribution::point_mass(d, *a)).collect();
            let rows = realized_cost_vectors(&game, &ActionProfile(s)).unwrap();
            for (i, row) in rows.iter().enumerate() {
                prop_assert_eq!(&expected_cost_vector(&game, &dists, i).unwrap(), row);
            }
        }

        #[test]
        fn opt_bounds_every_profile(game in small_congestion(), seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (_, opt) = brute_force_opt(&game).unwrap();
            for _ in 0..50 {
                let s: Vec<usize> = (0..game.players()).map(|_| rng.gen_range(0..game.actions())).collect();
                prop_assert!(opt <= game.social_value(&s));
            }
        }
    }
}
