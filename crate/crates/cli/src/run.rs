//! Runs every trial of an experiment and evaluates the requested
//! certificates.

use lar_dynamics::engine::{run_trials, Trajectory};
use lar_dynamics::games::{verify_smoothness, Objective};
use lar_dynamics::metrics::{
    dynamic_bound, dynamic_summary, efficiency_report, hp_bound, hp_check, hp_gamma, lar_certificate,
    regret_series, Comparator, DynamicReport, DynamicSummary, EfficiencyReport, HpCheck, LarCertificate,
};
use lar_dynamics::simplex::{LarParams, SmoothnessParams};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::Result;

/// Version of the CSV and JSON layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub schema_version: u32,
    pub config_sha256: String,
    pub seed: u64,
}

/// One written round of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: usize,
    pub social_cost: f64,
    pub opt: f64,
    pub turnovers: usize,
    /// Running average regret of each player.
    pub regret: Vec<f64>,
    /// Each player's distribution, when dumped.
    pub distributions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub rows: Vec<Row>,
    pub lar: Vec<LarCertificate>,
    pub efficiency: Option<EfficiencyReport>,
    pub summary: DynamicSummary,
    pub max_uniform_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub lambda: f64,
    pub mu: f64,
    pub epsilon: f64,
    /// `None` when verification was not requested.
    pub verified: Option<bool>,
    pub worst_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LarSummary {
    pub comparator: Comparator,
    pub checked: usize,
    pub satisfied: usize,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencySummary {
    pub poa_bound: f64,
    pub additive_term: f64,
    pub worst_avg_social: f64,
    pub avg_opt: f64,
    pub satisfied_trials: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreezeSummary {
    pub max_deviation: f64,
    pub satisfied: bool,
}

/// Everything the JSON report holds, in output key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub header: Header,
    pub players: usize,
    pub actions: usize,
    pub horizon: usize,
    pub trials: usize,
    pub passed: bool,
    pub failures: Vec<String>,
    pub smoothness: Option<SmoothnessReport>,
    pub lar: Vec<LarSummary>,
    pub efficiency: Option<EfficiencySummary>,
    pub high_probability: Option<HpCheck>,
    pub dynamic: Option<DynamicReport>,
    pub uniform_freeze: Option<FreezeSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub trials: Vec<TrialRecord>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.report.passed
    }
}

fn smoothness_params(config: &ExperimentConfig) -> Result<Option<SmoothnessParams>> {
    let game = &config.dynamics.game;
    let Some((lambda, mu)) = config.certificates.smoothness.or_else(|| game.family_smoothness()) else {
        return Ok(None);
    };
    let eps = config.epsilons.first().copied().unwrap_or(0.0);
    Ok(Some(match game.objective() {
        Objective::CostMin => SmoothnessParams::cost_game(lambda, mu, eps)?,
        Objective::UtilityMax => SmoothnessParams::mechanism(lambda, mu, eps)?,
    }))
}

fn lar_params(config: &ExperimentConfig, player: usize) -> Result<LarParams> {
    let eps = config.epsilons[player];
    let a = config.certificates.a_budget.unwrap_or_else(|| config.dynamics.learners[player].a_budget(eps));
    Ok(LarParams::fixed(eps, a)?)
}

fn reduce_trial(
    config: &ExperimentConfig,
    params: Option<&SmoothnessParams>,
    trial: usize,
    traj: Trajectory,
) -> Result<TrialRecord> {
    let (n, d, horizon) = (traj.players(), traj.actions(), traj.horizon());
    let certs = &config.certificates;

    let mut lar = Vec::new();
    for &comparator in &certs.lar {
        for i in 0..n {
            lar.push(lar_certificate(&traj, i, &lar_params(config, i)?, comparator)?);
        }
    }
    let efficiency = match (certs.efficiency, params) {
        (true, Some(params)) => {
            let a = (0..n).map(|i| lar_params(config, i).map(|p| p.a_budget)).collect::<Result<Vec<_>>>()?;
            let shared = LarParams::fixed(config.epsilons[0], a.iter().copied().fold(0.0, f64::max))?;
            Some(efficiency_report(traj.objective(), traj.mean_social(), traj.mean_opt(), params, &shared, n, horizon)?)
        }
        _ => None,
    };

    let uniform = 1.0 / d as f64;
    let mut max_uniform_deviation = 0.0f64;
    for t in 0..horizon {
        for i in 0..n {
            for w in traj.distribution(t, i) {
                max_uniform_deviation = max_uniform_deviation.max((w - uniform).abs());
            }
        }
    }

    let regret: Vec<Vec<f64>> = (0..n).map(|i| regret_series(&traj, i)).collect::<lar_dynamics::Result<_>>()?;
    let stride = config.output.stride;
    let rows = (0..horizon)
        .filter(|t| (t + 1) % stride == 0 || t + 1 == horizon)
        .map(|t| Row {
            t,
            social_cost: traj.social()[t],
            opt: traj.opt()[t],
            turnovers: traj.turnovers(t).len(),
            regret: regret.iter().map(|r| r[t]).collect(),
            distributions: if config.output.dump_distributions {
                (0..n).map(|i| traj.distribution(t, i).to_vec()).collect()
            } else {
                Vec::new()
            },
        })
        .collect();

    Ok(TrialRecord { trial, rows, lar, efficiency, summary: dynamic_summary(&traj), max_uniform_deviation })
}

/// Runs all trials in parallel and evaluates every requested certificate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let dynamics = &config.dynamics;
    let certs = &config.certificates;
    let (n, d) = (dynamics.game.players(), dynamics.game.actions());
    let mut failures = Vec::new();

    let params = smoothness_params(config)?;
    let needs_params = certs.efficiency || certs.hp_delta.is_some() || certs.dynamic || certs.verify_smoothness;
    if needs_params && params.is_none() {
        return Err(crate::CliError::Config(vec!["no smoothness parameters available for this game".into()]));
    }
    let smoothness = match &params {
        Some(p) if needs_params => {
            let check = if certs.verify_smoothness {
                let base = SmoothnessParams { epsilon: 0.0, ..*p };
                let cert = verify_smoothness(&dynamics.game, base)?;
                if !cert.verified {
                    failures.push(format!(
                        "smoothness ({}, {}) fails at {:?} with slack {}",
                        p.lambda, p.mu, cert.witness, cert.worst_slack
                    ));
                }
                Some(cert)
            } else {
                None
            };
            Some(SmoothnessReport {
                lambda: p.lambda,
                mu: p.mu,
                epsilon: p.epsilon,
                verified: check.as_ref().map(|c| c.verified),
                worst_slack: check.as_ref().map(|c| c.worst_slack),
            })
        }
        _ => None,
    };

    let trials = run_trials(dynamics, |trial, traj| {
        reduce_trial(config, params.as_ref(), trial, traj).map_err(|e| match e {
            crate::CliError::Core(e) => e,
            other => lar_dynamics::Error::Numerical(other.to_string()),
        })
    })?;

    let mut lar = Vec::new();
    for &comparator in &certs.lar {
        let matching: Vec<(usize, &LarCertificate)> = trials
            .iter()
            .flat_map(|r| r.lar.iter().filter(|c| c.comparator == comparator).map(move |c| (r.trial, c)))
            .collect();
        for (trial, c) in matching.iter().filter(|(_, c)| !c.satisfied) {
            failures.push(format!(
                "lar[{}] trial {trial} player {}: residual {:.6e}",
                comparator_label(comparator),
                c.player,
                c.residual
            ));
        }
        lar.push(LarSummary {
            comparator,
            checked: matching.len(),
            satisfied: matching.iter().filter(|(_, c)| c.satisfied).count(),
            worst_residual: matching.iter().map(|(_, c)| c.residual).fold(f64::NEG_INFINITY, f64::max),
        });
    }

    let efficiency = if certs.efficiency && !trials.is_empty() {
        let reports: Vec<&EfficiencyReport> = trials.iter().filter_map(|r| r.efficiency.as_ref()).collect();
        for (r, rep) in trials.iter().zip(&reports) {
            if !rep.bound_satisfied {
                failures.push(format!(
                    "efficiency trial {}: average {:.6} against bound {:.6}*{:.6} + {:.6}",
                    r.trial, rep.avg_social, rep.poa_bound, rep.avg_opt, rep.additive_term
                ));
            }
        }
        let worst = match dynamics.game.objective() {
            Objective::CostMin => reports.iter().map(|r| r.avg_social).fold(f64::NEG_INFINITY, f64::max),
            Objective::UtilityMax => reports.iter().map(|r| r.avg_social).fold(f64::INFINITY, f64::min),
        };
        Some(EfficiencySummary {
            poa_bound: reports[0].poa_bound,
            additive_term: reports[0].additive_term,
            worst_avg_social: worst,
            avg_opt: reports.iter().map(|r| r.avg_opt).sum::<f64>() / reports.len() as f64,
            satisfied_trials: reports.iter().filter(|r| r.bound_satisfied).count(),
            trials: reports.len(),
        })
    } else {
        None
    };

    let shared_lar = || -> Result<LarParams> {
        let a = (0..n).map(|i| lar_params(config, i).map(|p| p.a_budget)).collect::<Result<Vec<_>>>()?;
        Ok(LarParams::fixed(config.epsilons[0], a.into_iter().fold(0.0, f64::max))?)
    };

    let high_probability = match (certs.hp_delta, &params) {
        (Some(delta), Some(p)) if !trials.is_empty() => {
            let lar = shared_lar()?;
            let bound = hp_bound(p, n, dynamics.horizon, delta, lar.a_budget, hp_gamma(lar.epsilon))?;
            let averages: Vec<f64> = trials.iter().map(|r| r.summary.mean_social).collect();
            let avg_opt = trials.iter().map(|r| r.summary.mean_opt).sum::<f64>() / trials.len() as f64;
            let check = hp_check(&averages, avg_opt, &bound, delta)?;
            if !check.satisfied {
                failures.push(format!(
                    "high_probability: {} quantile {:.6} exceeds bound {:.6}",
                    1.0 - delta,
                    check.quantile,
                    check.bound
                ));
            }
            Some(check)
        }
        _ => None,
    };

    let dynamic = match (certs.dynamic, &params) {
        (true, Some(p)) if !trials.is_empty() => {
            let summaries: Vec<DynamicSummary> = trials.iter().map(|r| r.summary).collect();
            let report = dynamic_bound(&summaries, p, &shared_lar()?, n, dynamics.horizon)?;
            if !report.bound_satisfied {
                failures.push(format!(
                    "dynamic: average {:.6} against bound {:.6}*{:.6} + {:.6}",
                    report.avg_social, report.coefficient, report.avg_opt, report.additive_term
                ));
            }
            Some(report)
        }
        _ => None,
    };

    let uniform_freeze = certs.uniform_freeze.then(|| {
        let max_deviation = trials.iter().map(|r| r.max_uniform_deviation).fold(0.0, f64::max);
        let satisfied = max_deviation == 0.0;
        if !satisfied {
            failures.push(format!("uniform_freeze: distributions moved by up to {max_deviation:.6e}"));
        }
        FreezeSummary { max_deviation, satisfied }
    });

    let report = Report {
        header: Header { schema_version: SCHEMA_VERSION, config_sha256: config.hash.clone(), seed: dynamics.base_seed },
        players: n,
        actions: d,
        horizon: dynamics.horizon,
        trials: trials.len(),
        passed: failures.is_empty(),
        failures,
        smoothness,
        lar,
        efficiency,
        high_probability,
        dynamic,
        uniform_freeze,
    };
    Ok(RunOutput { report, trials })
}

pub fn comparator_label(comparator: Comparator) -> String {
    match comparator {
        Comparator::Fixed => "fixed".into(),
        Comparator::Stable => "stable".into(),
        Comparator::ShiftingK(k) => format!("shifting:{k}"),
    }
}
