use super::*;
use crate::games::Resource;
use crate::learners::LearnerKind;

fn two_by_two() -> GameSpec {
    GameSpec::load_balancing(2, vec![1.0, 1.0]).unwrap()
}

fn hedge(d: usize, horizon: usize) -> LearnerConfig {
    LearnerConfig::new(LearnerKind::Hedge, 0.1, d, horizon)
}

fn congestion() -> GameSpec {
    let resources = vec![
        Resource { a: 1.0, b: 0.0 },
        Resource { a: 0.5, b: 0.5 },
        Resource { a: 2.0, b: 0.0 },
    ];
    let strategies = vec![vec![vec![0], vec![1], vec![2], vec![0, 1]]; 3];
    GameSpec::affine_congestion(resources, strategies).unwrap()
}

#[test]
fn single_round_records_the_uniform_start() {
    let config = DynamicsConfig::new(two_by_two(), hedge(2, 1), FeedbackModel::Realized, 1);
    let traj = run_dynamics(&config, 0).unwrap();
    assert_eq!(traj.horizon(), 1);
    for i in 0..2 {
        assert_eq!(traj.distribution(0, i), &[0.5, 0.5]);
    }
}

#[test]
fn expectation_feedback_freezes_every_full_information_learner() {
    for kind in [
        LearnerKind::Hedge,
        LearnerKind::TunedHedge,
        LearnerKind::OptimisticHedge,
        LearnerKind::NoisyHedge,
    ] {
        let learner = LearnerConfig::new(kind, 0.1, 2, 2000);
        let config = DynamicsConfig::new(two_by_two(), learner, FeedbackModel::Expectation, 2000);
        let traj = run_dynamics(&config, 7).unwrap();
        for t in 0..traj.horizon() {
            for i in 0..2 {
                assert_eq!(traj.distribution(t, i), &[0.5, 0.5], "{kind:?} moved at round {t}");
            }
        }
    }
}

#[test]
fn realized_feedback_moves_away_from_uniform() {
    let mut config = DynamicsConfig::new(two_by_two(), hedge(2, 2000), FeedbackModel::Realized, 2000);
    config.base_seed = 11;
    for trial in 0..5 {
        let traj = run_dynamics(&config, trial).unwrap();
        let moved = (0..traj.horizon()).any(|t| (traj.distribution(t, 0)[0] - 0.5).abs() > 1e-3);
        assert!(moved, "trial {trial} stayed at uniform");
    }
}

#[test]
fn runs_are_deterministic_per_trial() {
    let mut config = DynamicsConfig::new(congestion(), hedge(4, 300), FeedbackModel::Realized, 300);
    config.base_seed = 99;
    config.turnover_p = 0.05;
    let a = run_dynamics(&config, 3).unwrap();
    assert_eq!(a, run_dynamics(&config, 3).unwrap());
    assert_ne!(a, run_dynamics(&config, 4).unwrap());
    config.trials = 4;
    let via_runner = run_trials(&config, |_, traj| Ok(traj)).unwrap();
    assert_eq!(via_runner[3], a);
}

#[test]
fn static_runs_have_constant_opt_and_no_shifts() {
    let config = DynamicsConfig::new(congestion(), hedge(4, 500), FeedbackModel::Realized, 500);
    let traj = run_dynamics(&config, 0).unwrap();
    let opt = brute_force_opt(&congestion()).unwrap().1;
    assert!(traj.opt().iter().all(|o| *o == opt));
    assert_eq!(traj.shifts().total_changes(), 0);
    assert_eq!(traj.shifts().total_tv(), 0.0);
}

#[test]
fn smoothness_holds_pointwise_along_a_trajectory() {
    let game = congestion();
    let (lambda, mu) = game.family_smoothness().unwrap();
    let config = DynamicsConfig::new(game, hedge(4, 2000), FeedbackModel::Realized, 2000);
    let traj = run_dynamics(&config, 1).unwrap();
    for t in (0..traj.horizon()).step_by(37) {
        let star = traj.stable(t);
        let lhs: f64 = (0..3).map(|i| traj.payoff_vector(t, i)[star[i]]).sum();
        assert!(lhs <= lambda * traj.stable_social()[t] + mu * traj.social()[t] + 1e-12);
    }
}

#[test]
fn turnover_extremes_and_rate() {
    let mut rng = trial_rng(5, 0, 0);
    assert!(turnover_step(10, 0.0, &mut rng).is_empty());
    assert_eq!(turnover_step(10, 1.0, &mut rng), (0..10).collect::<Vec<_>>());
    let rounds = 10_000;
    let total: usize = (0..rounds).map(|_| turnover_step(10, 0.1, &mut rng).len()).sum();
    let mean = total as f64 / rounds as f64;
    let sd = (10.0 * 0.1 * 0.9 / rounds as f64).sqrt();
    assert!((mean - 1.0).abs() <= 3.0 * sd, "mean {mean}");
}

#[test]
fn stable_step_updates_only_replaced_players() {
    let game = two_by_two();
    let start = ActionProfile(vec![0, 1]);
    let (same, deltas) = stable_sequence_step(&game, &start, &[]);
    assert_eq!(same, start);
    assert!(deltas.iter().all(|d| !d.changed && d.tv == 0.0));

    let (next, deltas) = stable_sequence_step(&game, &start, &[0]);
    assert_eq!(next, ActionProfile(vec![0, 1]));
    assert_eq!(deltas.iter().filter(|d| d.changed).count(), 1);
    assert!(deltas[0].changed && !deltas[1].changed);
}

#[test]
fn measured_rho_stays_within_two_on_load_balancing() {
    let game = GameSpec::load_balancing(4, vec![1.0, 0.9, 0.8, 0.7]).unwrap();
    let learner = LearnerConfig::new(LearnerKind::NoisyHedge, 0.1, 4, 3000);
    let mut config = DynamicsConfig::new(game, learner, FeedbackModel::Realized, 3000);
    config.turnover_p = 0.01;
    for trial in 0..4 {
        let traj = run_dynamics(&config, trial).unwrap();
        assert!(traj.measured_rho() <= 2.0, "rho {}", traj.measured_rho());
        assert!(traj.shifts().total_changes() > 0);
        let k = traj.shifts();
        for i in 0..4 {
            assert_eq!(k.k_tv[i], 2.0 * k.k_changes[i] as f64);
            assert!(k.k_changes[i] < traj.horizon() as u64);
        }
    }
}

#[test]
fn dispatch_examples() {
    let game = two_by_two();
    let uniform = vec![ActionDistribution::uniform(2); 2];
    let s = ActionProfile(vec![1, 1]);
    let (_, expected) = dispatch_feedback(FeedbackModel::Expectation, &game, &uniform, &s).unwrap();
    assert!(expected.iter().all(|c| c.values() == [0.75, 0.75]));

    let points: Vec<_> = s.actions().iter().map(|a| ActionDistribution::point_mass(2, *a)).collect();
    let (_, realized) = dispatch_feedback(FeedbackModel::Realized, &game, &points, &s).unwrap();
    let (_, expected) = dispatch_feedback(FeedbackModel::Expectation, &game, &points, &s).unwrap();
    assert_eq!(realized, expected);

    let (bandit, _) = dispatch_feedback(FeedbackModel::Bandit, &game, &uniform, &s).unwrap();
    for (i, f) in bandit.iter().enumerate() {
        assert_eq!(*f, Feedback::Bandit { played: 1, observed: realized[i].values()[1] });
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let base = DynamicsConfig::new(two_by_two(), hedge(2, 10), FeedbackModel::Realized, 10);
    let mut c = base.clone();
    c.turnover_p = 1.5;
    assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("turnover_p")));
    let mut c = base.clone();
    c.feedback = FeedbackModel::Bandit;
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.learners[0] = c.learners[0].with_mode(Mode::Utility);
    assert!(c.validate().is_err());
    let mut c = base;
    c.learners.pop();
    assert!(c.validate().is_err());
}

#[test]
fn bandit_and_utility_dynamics_run() {
    let learner = LearnerConfig::new(LearnerKind::LogBarrierBandit, 0.2, 2, 500);
    let config = DynamicsConfig::new(two_by_two(), learner, FeedbackModel::Bandit, 500);
    run_dynamics(&config, 0).unwrap();

    let auction = GameSpec::first_price_auction(vec![1.0, 0.5], vec![0.0, 0.25, 0.5, 0.75], 0.1).unwrap();
    let learner = LearnerConfig::new(LearnerKind::Hedge, 0.1, 4, 500).with_mode(Mode::Utility);
    let mut config = DynamicsConfig::new(auction, learner, FeedbackModel::Realized, 500);
    config.turnover_p = 0.02;
    let traj = run_dynamics(&config, 0).unwrap();
    assert!(traj.social().iter().all(|w| (0.0..=1.0).contains(w)));
}
