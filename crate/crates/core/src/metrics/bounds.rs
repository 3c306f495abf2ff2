//! Efficiency bounds as pure functions of their parameters.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::games::Objective;
use crate::simplex::{LarParams, SmoothnessParams};

/// Tolerance on every bound comparison.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// `lambda / (1 - mu - epsilon)`.
pub fn poa_bound_cost(params: &SmoothnessParams) -> Result<f64> {
    let denom = 1.0 - params.mu - params.epsilon;
    if !(denom > 0.0) {
        return domain(format!("need mu + epsilon < 1, got {} + {}", params.mu, params.epsilon));
    }
    Ok(params.lambda / denom)
}

/// Guaranteed welfare fraction `lambda / max(mu, 1 + epsilon)`.
pub fn poa_bound_utility(params: &SmoothnessParams) -> Result<f64> {
    if !(params.lambda > 0.0) {
        return domain(format!("lambda must be positive, got {}", params.lambda));
    }
    Ok(params.lambda / params.mu.max(1.0 + params.epsilon))
}

/// Price of anarchy of a mechanism: the reciprocal of the welfare fraction.
pub fn utility_price_of_anarchy(params: &SmoothnessParams) -> Result<f64> {
    Ok(1.0 / poa_bound_utility(params)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpCheck {
    pub delta: f64,
    pub quantile: f64,
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub objective: Objective,
    pub avg_social: f64,
    pub avg_opt: f64,
    /// Multiplier on the optimum: `lambda/(1-mu-eps)` for costs, the welfare
    /// fraction for mechanisms.
    pub poa_bound: f64,
    pub additive_term: f64,
    pub bound_satisfied: bool,
    pub hp: Vec<HpCheck>,
}

/// Checks the time-averaged social objective of one run against the bound
/// for `n` players over `horizon` rounds.
///
/// Costs: `avg C <= lambda/(1-mu-eps) OPT + n/T * 1/(1-mu-eps) * A/eps`.
/// Welfare: `avg SW >= lambda/max(mu,1+eps) OPT - n/T * 1/max(mu,1+eps) * A/eps`.
pub fn efficiency_report(
    objective: Objective,
    avg_social: f64,
    avg_opt: f64,
    params: &SmoothnessParams,
    lar: &LarParams,
    n: usize,
    horizon: usize,
) -> Result<EfficiencyReport> {
    if horizon == 0 {
        return domain("efficiency report needs at least one round");
    }
    let scale = n as f64 / horizon as f64 * lar.a_budget / lar.epsilon;
    let (poa_bound, additive_term, bound_satisfied) = match objective {
        Objective::CostMin => {
            let coefficient = poa_bound_cost(params)?;
            let additive = scale / (1.0 - params.mu - params.epsilon);
            let ok = avg_social <= coefficient * avg_opt + additive + BOUND_TOLERANCE;
            (coefficient, additive, ok)
        }
        Objective::UtilityMax => {
            let fraction = poa_bound_utility(params)?;
            let additive = scale / params.mu.max(1.0 + params.epsilon);
            let ok = avg_social >= fraction * avg_opt - additive - BOUND_TOLERANCE;
            (fraction, additive, ok)
        }
    };
    Ok(EfficiencyReport {
        objective,
        avg_social,
        avg_opt,
        poa_bound,
        additive_term,
        bound_satisfied,
        hp: Vec::new(),
    })
}

/// `2 eps / (1 + eps)`.
pub fn hp_gamma(epsilon: f64) -> f64 {
    2.0 * epsilon / (1.0 + epsilon)
}

/// Inverse of [`hp_gamma`]: `gamma / (2 - gamma)`.
pub fn epsilon_from_hp_gamma(gamma: f64) -> f64 {
    gamma / (2.0 - gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpBound {
    /// `lambda / (1 - mu - gamma)`.
    pub coefficient: f64,
    /// `n/T * 1/(1-mu-gamma) * (4A + 12 log(n log2(T) / delta)) / gamma`.
    pub additive: f64,
}

impl HpBound {
    pub fn value(&self, opt: f64) -> f64 {
        self.coefficient * opt + self.additive
    }
}

/// High-probability bound on the average social cost of a single run.
pub fn hp_bound(
    params: &SmoothnessParams,
    n: usize,
    horizon: usize,
    delta: f64,
    a_budget: f64,
    gamma: f64,
) -> Result<HpBound> {
    if horizon < 4 || n == 0 {
        return domain(format!("need T >= 4 and n >= 1, got T={horizon}, n={n}"));
    }
    let log_rounds = (horizon as f64).log2();
    let delta_cap = 1f64.min(n as f64 * log_rounds / std::f64::consts::E);
    if !(delta > 0.0 && delta < delta_cap) {
        return domain(format!("delta {delta} outside (0, {delta_cap})"));
    }
    let denom = 1.0 - params.mu - gamma;
    if !(gamma > 0.0) || !(denom > 0.0) {
        return domain(format!("need 0 < gamma < 1 - mu, got gamma={gamma}, mu={}", params.mu));
    }
    let tail = 12.0 * (n as f64 * log_rounds / delta).ln();
    Ok(HpBound {
        coefficient: params.lambda / denom,
        additive: n as f64 / horizon as f64 / denom * (4.0 * a_budget + tail) / gamma,
    })
}

/// Nearest-rank `q`-quantile: the `ceil(q N)`-th smallest value.
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return domain("quantile needs values and q in [0, 1]");
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

/// Compares the empirical `(1 - delta)`-quantile of per-trial average social
/// cost against the high-probability bound.
pub fn hp_check(per_trial_avg: &[f64], avg_opt: f64, bound: &HpBound, delta: f64) -> Result<HpCheck> {
    let quantile = empirical_quantile(per_trial_avg, 1.0 - delta)?;
    let value = bound.value(avg_opt);
    Ok(HpCheck { delta, quantile, bound: value, satisfied: quantile <= value + BOUND_TOLERANCE })
}

/// One trial of a dynamic-population run, reduced to what the bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicSummary {
    pub mean_social: f64,
    pub mean_opt: f64,
    pub rho: f64,
    pub sum_k_changes: f64,
    pub sum_k_tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicReport {
    pub trials: usize,
    pub avg_social: f64,
    pub avg_opt: f64,
    /// Largest measured approximation factor of the stable sequence.
    pub rho: f64,
    pub mean_sum_k: f64,
    pub coefficient: f64,
    pub additive_term: f64,
    pub bound_satisfied: bool,
}

/// Trial-averaged dynamic-population bound:
/// `avg C <= lambda rho/(1-mu-eps) avg OPT + (n + E sum K)/T * 1/(1-mu-eps) * A/eps`,
/// where `K_i` counts the stable sequence's changes.
pub fn dynamic_bound(
    summaries: &[DynamicSummary],
    params: &SmoothnessParams,
    lar: &LarParams,
    n: usize,
    horizon: usize,
) -> Result<DynamicReport> {
    if summaries.is_empty() || horizon == 0 {
        return domain("dynamic bound needs at least one trial and one round");
    }
    let trials = summaries.len() as f64;
    let mean = |f: fn(&DynamicSummary) -> f64| summaries.iter().map(f).sum::<f64>() / trials;
    let avg_social = mean(|s| s.mean_social);
    let avg_opt = mean(|s| s.mean_opt);
    let mean_sum_k = mean(|s| s.sum_k_changes);
    let rho = summaries.iter().map(|s| s.rho).fold(1.0, f64::max);
    let base = poa_bound_cost(params)?;
    let coefficient = base * rho;
    let scale = (n as f64 + mean_sum_k) / horizon as f64 * lar.a_budget / lar.epsilon;
    let additive_term = scale / (1.0 - params.mu - params.epsilon);
    Ok(DynamicReport {
        trials: summaries.len(),
        avg_social,
        avg_opt,
        rho,
        mean_sum_k,
        coefficient,
        additive_term,
        bound_satisfied: avg_social <= coefficient * avg_opt + additive_term + BOUND_TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdVariant {
    Ours,
    Prior,
}

/// Largest tolerated turnover probability given `log(dT)`:
/// `eps^2 gamma / (kappa log dT)` (ours) or `eps^2 gamma^2 / (kappa log dT)` (prior).
pub fn turnover_threshold_from_log(
    epsilon: f64,
    min_cost_gamma: f64,
    kappa: f64,
    log_dt: f64,
    variant: ThresholdVariant,
) -> Result<f64> {
    if !(epsilon > 0.0 && min_cost_gamma > 0.0 && kappa > 0.0 && log_dt > 0.0) {
        return domain("turnover threshold needs positive arguments and dT > 1");
    }
    let gamma_power = match variant {
        ThresholdVariant::Ours => min_cost_gamma,
        ThresholdVariant::Prior => min_cost_gamma * min_cost_gamma,
    };
    Ok(epsilon * epsilon * gamma_power / (kappa * log_dt))
}

pub fn turnover_threshold(
    epsilon: f64,
    min_cost_gamma: f64,
    kappa: f64,
    d: usize,
    horizon: usize,
    variant: ThresholdVariant,
) -> Result<f64> {
    let log_dt = (d as f64 * horizon as f64).ln();
    turnover_threshold_from_log(epsilon, min_cost_gamma, kappa, log_dt, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(lambda: f64, mu: f64, epsilon: f64) -> SmoothnessParams {
        SmoothnessParams { lambda, mu, epsilon }
    }

    #[test]
    fn price_of_anarchy_values() {
        assert!((poa_bound_cost(&p(5.0 / 3.0, 1.0 / 3.0, 0.0)).unwrap() - 2.5).abs() < 1e-15);
        assert!((poa_bound_cost(&p(1.0, 0.25, 0.0)).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let v = poa_bound_cost(&p(5.0 / 3.0, 1.0 / 3.0, 0.1)).unwrap();
        assert!((v - (5.0 / 3.0) / (1.0 - 1.0 / 3.0 - 0.1)).abs() < 1e-15);
        assert!((v - 2.9412).abs() < 5e-5);
        assert!(poa_bound_cost(&p(1.0, 0.5, 0.5)).is_err());

        let e = std::f64::consts::E;
        let fp = utility_price_of_anarchy(&p(1.0 - 1.0 / e, 1.0, 0.0)).unwrap();
        assert!((fp - e / (e - 1.0)).abs() < 1e-12 && (fp - 1.582).abs() < 1e-3);
        assert!((utility_price_of_anarchy(&p(0.5, 1.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(utility_price_of_anarchy(&p(1.0, 0.5, 0.0)).unwrap(), 1.0);
        assert!(poa_bound_utility(&p(0.0, 0.5, 0.0)).is_err());
    }

    #[test]
    fn report_at_the_optimum_is_satisfied() {
        let params = p(5.0 / 3.0, 1.0 / 3.0, 0.1);
        let lar = LarParams::fixed(0.1, 4f64.ln()).unwrap();
        let r = efficiency_report(Objective::CostMin, 1.3, 1.3, &params, &lar, 4, 1000).unwrap();
        assert!(r.bound_satisfied);
        let r = efficiency_report(Objective::CostMin, 4.0, 1.3, &params, &lar, 4, 1_000_000).unwrap();
        assert!(!r.bound_satisfied);
        let mech = p(1.0 - (-1f64).exp(), 1.0, 0.1);
        let r = efficiency_report(Objective::UtilityMax, 1.0, 1.0, &mech, &lar, 2, 1000).unwrap();
        assert!(r.bound_satisfied);
    }

    #[test]
    fn hp_examples() {
        assert!((hp_gamma(0.1) - 0.2 / 1.1).abs() < 1e-15);
        assert!((hp_gamma(0.1) - 0.18182).abs() < 5e-6);
        let params = p(5.0 / 3.0, 1.0 / 3.0, 0.0);
        let g = hp_gamma(0.1);
        let loose = hp_bound(&params, 4, 1 << 14, 0.05, 4f64.ln(), g).unwrap();
        let tight = hp_bound(&params, 4, 1 << 14, 0.001, 4f64.ln(), g).unwrap();
        assert!(tight.additive > loose.additive);
        assert_eq!(tight.coefficient, loose.coefficient);
        assert!(hp_bound(&params, 4, 3, 0.05, 1.0, g).is_err());
        assert!(hp_bound(&params, 4, 1 << 14, 0.0, 1.0, g).is_err());
        assert!(hp_bound(&params, 4, 1 << 14, 0.05, 1.0, 0.7).is_err());
    }

    #[test]
    fn quantiles() {
        let v = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(empirical_quantile(&v, 0.95).unwrap(), 5.0);
        assert_eq!(empirical_quantile(&v, 0.4).unwrap(), 2.0);
        assert_eq!(empirical_quantile(&v, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn dynamic_reduces_to_static_without_shifts() {
        let params = p(5.0 / 3.0, 1.0 / 3.0, 0.1);
        let lar = LarParams::fixed(0.1, 4f64.ln()).unwrap();
        let s = DynamicSummary { mean_social: 1.5, mean_opt: 1.0, rho: 1.0, sum_k_changes: 0.0, sum_k_tv: 0.0 };
        let dynamic = dynamic_bound(&[s], &params, &lar, 4, 100).unwrap();
        let fixed = efficiency_report(Objective::CostMin, 1.5, 1.0, &params, &lar, 4, 100).unwrap();
        assert_eq!(dynamic.coefficient, fixed.poa_bound);
        assert_eq!(dynamic.additive_term, fixed.additive_term);
        assert_eq!(dynamic.bound_satisfied, fixed.bound_satisfied);
    }

    #[test]
    fn threshold_examples() {
        let ours = turnover_threshold_from_log(0.1, 0.1, 1.0, 10.0, ThresholdVariant::Ours).unwrap();
        let prior = turnover_threshold_from_log(0.1, 0.1, 1.0, 10.0, ThresholdVariant::Prior).unwrap();
        assert!((ours - 1e-4).abs() < 1e-18 && (prior - 1e-5).abs() < 1e-19);
        let a = turnover_threshold(0.2, 1.0, 2.0, 4, 100, ThresholdVariant::Ours).unwrap();
        let b = turnover_threshold(0.2, 1.0, 2.0, 4, 100, ThresholdVariant::Prior).unwrap();
        assert_eq!(a, b);
        assert!(turnover_threshold(0.1, 0.1, 1.0, 1, 1, ThresholdVariant::Ours).is_err());
    }

    proptest! {
        #[test]
        fn hp_gamma_round_trip(eps in 1e-9f64..1.0) {
            let back = epsilon_from_hp_gamma(hp_gamma(eps));
            prop_assert!((back - eps).abs() <= 8.0 * f64::EPSILON * eps);
        }

        #[test]
        fn threshold_ratio_and_monotonicity(
            eps in 0.01f64..1.0, gamma in 0.01f64..1.0, kappa in 0.1f64..5.0, log_dt in 0.5f64..30.0,
        ) {
            let ours = turnover_threshold_from_log(eps, gamma, kappa, log_dt, ThresholdVariant::Ours).unwrap();
            let prior = turnover_threshold_from_log(eps, gamma, kappa, log_dt, ThresholdVariant::Prior).unwrap();
            prop_assert!(((ours / prior) * gamma - 1.0).abs() <= 1e-12);
            for v in [ThresholdVariant::Ours, ThresholdVariant::Prior] {
                let base = turnover_threshold_from_log(eps, gamma, kappa, log_dt, v).unwrap();
                prop_assert!(turnover_threshold_from_log(eps * 1.1, gamma, kappa, log_dt, v).unwrap() > base);
                prop_assert!(turnover_threshold_from_log(eps, gamma * 0.9, kappa, log_dt, v).unwrap() < base);
                prop_assert!(turnover_threshold_from_log(eps, gamma, kappa * 1.1, log_dt, v).unwrap() < base);
                prop_assert!(turnover_threshold_from_log(eps, gamma, kappa, log_dt * 1.1, v).unwrap() < base);
            }
        }

        #[test]
        fn bounds_are_pure(lambda in 0.1f64..3.0, mu in 0.0f64..0.5, eps in 0.01f64..0.4) {
            let params = p(lambda, mu, eps);
            prop_assert_eq!(poa_bound_cost(&params).unwrap().to_bits(), poa_bound_cost(&params).unwrap().to_bits());
            prop_assert!(poa_bound_cost(&params).unwrap() >= lambda);
        }
    }
}
