//! Experiment configuration: TOML text in, a validated [`ExperimentConfig`]
//! out, or the full list of schema violations.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use lar_dynamics::engine::{DynamicsConfig, FeedbackModel, RedrawPolicy};
use lar_dynamics::games::{GameSpec, Objective, Resource};
use lar_dynamics::learners::{LearnerConfig, LearnerKind, Mode};
use lar_dynamics::metrics::Comparator;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::{CliError, Result};

/// What to certify after the run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertificateSpec {
    /// Per-player approximate-regret checks, one per comparator.
    pub lar: Vec<Comparator>,
    /// Overrides every learner's own budget `A`.
    pub a_budget: Option<f64>,
    /// Static efficiency bound on every trial.
    pub efficiency: bool,
    /// High-probability bound at this failure probability.
    pub hp_delta: Option<f64>,
    /// Dynamic-population bound over the trial average.
    pub dynamic: bool,
    /// Smoothness parameters; the family certificate when absent.
    pub smoothness: Option<(f64, f64)>,
    /// Brute-force the smoothness inequality before trusting it.
    pub verify_smoothness: bool,
    /// Every distribution must stay exactly uniform.
    pub uniform_freeze: bool,
}

impl CertificateSpec {
    pub fn any(&self) -> bool {
        !self.lar.is_empty()
            || self.efficiency
            || self.hp_delta.is_some()
            || self.dynamic
            || self.verify_smoothness
            || self.uniform_freeze
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write every `stride`-th round (and always the last one).
    pub stride: usize,
    pub dump_distributions: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dynamics: DynamicsConfig,
    /// Per-player approximation parameter the learners were tuned for.
    pub epsilons: Vec<f64>,
    pub certificates: CertificateSpec,
    pub output: OutputSpec,
    /// Sorted-key TOML of the effective config, output directory excluded.
    pub canonical: String,
    /// SHA-256 of `canonical`, hex.
    pub hash: String,
}

/// Command-line values that replace config fields before validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub dump_distributions: bool,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config_with(path, &Overrides::default())
}

pub fn parse_config_with(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse_config_str(&text, overrides)
}

pub fn parse_config_str(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(vec![e.to_string()]))?;
    apply_overrides(&mut root, overrides);
    let mut errors = Vec::new();
    let built = build(&root, &mut errors);
    match built {
        Some(mut config) if errors.is_empty() => {
            let mut hashed = root.clone();
            if let Some(Value::Table(output)) = hashed.get_mut("output") {
                output.remove("dir");
                if output.is_empty() {
                    hashed.remove("output");
                }
            }
            config.canonical = toml::to_string(&hashed).expect("TOML values serialize");
            config.hash = hex::encode(Sha256::digest(config.canonical.as_bytes()));
            Ok(config)
        }
        _ => Err(CliError::Config(errors)),
    }
}

fn apply_overrides(root: &mut Table, overrides: &Overrides) {
    if let Some(trials) = overrides.trials {
        root.insert("trials".into(), Value::Integer(trials as i64));
    }
    if let Some(seed) = overrides.seed {
        root.insert("seed".into(), Value::Integer(seed as i64));
    }
    if overrides.out.is_some() || overrides.dump_distributions {
        let output = root.entry("output").or_insert_with(|| Value::Table(Table::new()));
        if let Value::Table(output) = output {
            if let Some(out) = &overrides.out {
                output.insert("dir".into(), Value::String(out.display().to_string()));
            }
            if overrides.dump_distributions {
                output.insert("dump_distributions".into(), Value::Boolean(true));
            }
        }
    }
}

/// A table being read. Remembers which keys were consumed so leftovers can
/// be reported as unknown.
struct Section<'a> {
    path: String,
    table: &'a Table,
    used: BTreeSet<&'a str>,
}

impl<'a> Section<'a> {
    fn new(path: impl Into<String>, table: &'a Table) -> Self {
        Self { path: path.into(), table, used: BTreeSet::new() }
    }

    fn name(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&mut self, key: &'a str) -> Option<&'a Value> {
        let (k, v) = self.table.get_key_value(key)?;
        self.used.insert(k.as_str());
        Some(v)
    }

    fn required(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<&'a Value> {
        let v = self.get(key);
        if v.is_none() {
            errors.push(format!("missing required key `{}`", self.name(key)));
        }
        v
    }

    fn typed<T>(
        &self,
        key: &str,
        value: Option<&'a Value>,
        expected: &str,
        read: impl Fn(&'a Value) -> Option<T>,
        errors: &mut Vec<String>,
    ) -> Option<T> {
        let value = value?;
        let out = read(value);
        if out.is_none() {
            errors.push(format!("`{}` must be {expected}", self.name(key)));
        }
        out
    }

    fn f64(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<f64> {
        let v = self.get(key);
        self.typed(key, v, "a number", as_f64, errors)
    }

    fn uint(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<u64> {
        let v = self.get(key);
        self.typed(key, v, "a nonnegative integer", |v| v.as_integer().and_then(|i| u64::try_from(i).ok()), errors)
    }

    fn bool(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<bool> {
        let v = self.get(key);
        self.typed(key, v, "a boolean", Value::as_bool, errors)
    }

    fn str(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<&'a str> {
        let v = self.get(key);
        self.typed(key, v, "a string", Value::as_str, errors)
    }

    fn f64_list(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<Vec<f64>> {
        let v = self.get(key);
        self.typed(key, v, "an array of numbers", |v| v.as_array()?.iter().map(as_f64).collect(), errors)
    }

    fn table(&mut self, key: &'a str, errors: &mut Vec<String>) -> Option<Section<'a>> {
        let v = self.get(key);
        let name = self.name(key);
        self.typed(key, v, "a table", Value::as_table, errors).map(|t| Section::new(name, t))
    }

    fn finish(self, errors: &mut Vec<String>) {
        for key in self.table.keys() {
            if !self.used.contains(key.as_str()) {
                errors.push(format!("unknown key `{}`", self.name(key)));
            }
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn range_error(errors: &mut Vec<String>, name: &str, value: impl std::fmt::Display, range: &str) {
    errors.push(format!("`{name}` = {value} outside {range}"));
}

fn build(root: &Table, errors: &mut Vec<String>) -> Option<ExperimentConfig> {
    let mut top = Section::new("", root);

    let horizon = top.required("horizon", errors).and(top.uint("horizon", errors));
    if horizon == Some(0) {
        range_error(errors, "horizon", 0, "[1, inf)");
    }
    let trials = top.uint("trials", errors).unwrap_or(1);
    let seed = top.uint("seed", errors).unwrap_or(0);
    let feedback = match top.str("feedback", errors).unwrap_or("realized") {
        "realized" => Some(FeedbackModel::Realized),
        "expectation" => Some(FeedbackModel::Expectation),
        "bandit" => Some(FeedbackModel::Bandit),
        other => {
            errors.push(format!("`feedback` = {other:?} is not one of realized, expectation, bandit"));
            None
        }
    };
    let turnover_p = top.f64("turnover_p", errors).unwrap_or(0.0);
    if !(0.0..=1.0).contains(&turnover_p) {
        range_error(errors, "turnover_p", turnover_p, "[0, 1]");
    }
    let redraw = match top.str("redraw", errors).unwrap_or("family") {
        "family" => Some(RedrawPolicy::Family),
        "keep" => Some(RedrawPolicy::Keep),
        other => {
            errors.push(format!("`redraw` = {other:?} is not one of family, keep"));
            None
        }
    };

    let game = match top.required("game", errors).and(top.table("game", errors)) {
        Some(section) => build_game(section, errors),
        None => None,
    };

    let learner_tables: Vec<Section> = match (top.get("learner"), top.get("learners")) {
        (Some(_), Some(_)) => {
            errors.push("give either `learner` or `learners`, not both".into());
            Vec::new()
        }
        (Some(Value::Table(t)), None) => vec![Section::new("learner", t)],
        (None, Some(Value::Array(items))) => items
            .iter()
            .enumerate()
            .filter_map(|(i, item)| match item {
                Value::Table(t) => Some(Section::new(format!("learners[{i}]"), t)),
                _ => {
                    errors.push(format!("`learners[{i}]` must be a table"));
                    None
                }
            })
            .collect(),
        (Some(_), None) => {
            errors.push("`learner` must be a table".into());
            Vec::new()
        }
        (None, Some(_)) => {
            errors.push("`learners` must be an array of tables".into());
            Vec::new()
        }
        (None, None) => {
            errors.push("missing required key `learner` (or `learners`)".into());
            Vec::new()
        }
    };
    let shared = top.table.contains_key("learner");
    let learners: Vec<Option<LearnerSpec>> =
        learner_tables.into_iter().map(|s| build_learner(s, errors)).collect();

    let certificates = match top.table("certificates", errors) {
        Some(section) => build_certificates(section, errors),
        None => Some(CertificateSpec::default()),
    };
    let output = match top.table("output", errors) {
        Some(section) => build_output(section, errors),
        None => Some(OutputSpec { dir: PathBuf::from("out"), stride: 1, dump_distributions: false }),
    };
    top.finish(errors);

    let (game, horizon, feedback, redraw) = (game?, horizon?, feedback?, redraw?);
    let (certificates, output) = (certificates?, output?);
    let learners: Vec<LearnerSpec> = learners.into_iter().collect::<Option<_>>()?;
    let n = game.players();
    let specs = if shared {
        vec![learners[0]; n]
    } else if learners.len() == n {
        learners
    } else {
        errors.push(format!("`learners` has {} entries for {n} players", learners.len()));
        return None;
    };
    let horizon = horizon as usize;
    let mode = match game.objective() {
        Objective::CostMin => Mode::Cost,
        Objective::UtilityMax => Mode::Utility,
    };
    let d = game.actions();
    let configs: Vec<LearnerConfig> = specs.iter().map(|s| s.config(mode, d, horizon)).collect();
    let epsilons: Vec<f64> = specs.iter().map(|s| s.epsilon).collect();

    let bounds_requested = certificates.efficiency || certificates.hp_delta.is_some() || certificates.dynamic;
    if bounds_requested && epsilons.iter().any(|e| *e != epsilons[0]) {
        errors.push("efficiency bounds need every learner to share one `epsilon`".into());
    }
    if (certificates.hp_delta.is_some() || certificates.dynamic) && mode == Mode::Utility {
        errors.push("`hp_delta` and `dynamic` bounds apply to cost games only".into());
    }

    let dynamics = DynamicsConfig {
        game,
        learners: configs,
        feedback,
        horizon,
        trials: trials as usize,
        base_seed: seed,
        turnover_p,
        redraw,
    };
    if let Err(e) = dynamics.validate() {
        errors.push(e.to_string());
    }
    if !errors.is_empty() {
        return None;
    }
    Some(ExperimentConfig {
        dynamics,
        epsilons,
        certificates,
        output,
        canonical: String::new(),
        hash: String::new(),
    })
}

fn build_game(mut s: Section, errors: &mut Vec<String>) -> Option<GameSpec> {
    let family = s.required("family", errors).and(s.str("family", errors));
    let game = match family? {
        "load_balancing" => {
            let players = s.required("players", errors).and(s.uint("players", errors));
            let bins = s.uint("bins", errors);
            let base = s.f64_list("base_weights", errors);
            let weights = s.get("weights");
            let base = match (bins, base) {
                (Some(_), Some(_)) => {
                    errors.push("give either `game.bins` or `game.base_weights`, not both".into());
                    None
                }
                (Some(b), None) => Some(vec![1.0; b as usize]),
                (None, Some(w)) => Some(w),
                (None, None) => {
                    errors.push("load balancing needs `game.bins` or `game.base_weights`".into());
                    None
                }
            };
            let weights = weights.and_then(|v| {
                let rows: Option<Vec<Vec<f64>>> =
                    v.as_array().and_then(|rows| rows.iter().map(|r| r.as_array()?.iter().map(as_f64).collect()).collect());
                if rows.is_none() {
                    errors.push("`game.weights` must be an array of number arrays".into());
                }
                rows
            });
            let (players, base) = (players? as usize, base?);
            match weights {
                Some(w) => GameSpec::load_balancing_with(players, base, w),
                None => GameSpec::load_balancing(players, base),
            }
        }
        "affine_congestion" => {
            let resources = s.required("resources", errors).and_then(|v| {
                let parsed: Option<Vec<Resource>> = v.as_array().and_then(|items| {
                    items
                        .iter()
                        .map(|r| {
                            let t = r.as_table()?;
                            if t.keys().any(|k| k != "a" && k != "b") {
                                return None;
                            }
                            Some(Resource { a: as_f64(t.get("a")?)?, b: as_f64(t.get("b")?)? })
                        })
                        .collect()
                });
                if parsed.is_none() {
                    errors.push("`game.resources` must be an array of {a, b} tables".into());
                }
                parsed
            });
            let strategies = s.required("strategies", errors).and_then(|v| {
                let parsed: Option<Vec<Vec<Vec<usize>>>> = v.as_array().and_then(|players| {
                    players
                        .iter()
                        .map(|p| {
                            p.as_array()?
                                .iter()
                                .map(|set| {
                                    set.as_array()?
                                        .iter()
                                        .map(|r| r.as_integer().and_then(|i| usize::try_from(i).ok()))
                                        .collect()
                                })
                                .collect()
                        })
                        .collect()
                });
                if parsed.is_none() {
                    errors.push("`game.strategies` must be per-player arrays of resource-index arrays".into());
                }
                parsed
            });
            GameSpec::affine_congestion(resources?, strategies?)
        }
        family @ ("first_price_auction" | "all_pay_auction") => {
            let values = s.required("values", errors).and(s.f64_list("values", errors));
            let fractions = s.required("bid_fractions", errors).and(s.f64_list("bid_fractions", errors));
            let min_value = s.f64("min_value", errors).unwrap_or(0.0);
            let (values, fractions) = (values?, fractions?);
            if family == "first_price_auction" {
                GameSpec::first_price_auction(values, fractions, min_value)
            } else {
                GameSpec::all_pay_auction(values, fractions, min_value)
            }
        }
        other => {
            errors.push(format!(
                "`game.family` = {other:?} is not one of load_balancing, affine_congestion, \
                 first_price_auction, all_pay_auction"
            ));
            s.finish(&mut Vec::new());
            return None;
        }
    };
    s.finish(errors);
    match game {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(format!("game: {e}"));
            None
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct LearnerSpec {
    kind: LearnerKind,
    epsilon: f64,
    eta: Option<f64>,
    theta: Option<f64>,
}

impl LearnerSpec {
    fn config(&self, mode: Mode, d: usize, horizon: usize) -> LearnerConfig {
        let eta = self.eta.unwrap_or_else(|| LearnerConfig::eta_for_epsilon(self.kind, mode, self.epsilon));
        let config = LearnerConfig::new(self.kind, eta, d, horizon).with_mode(mode);
        match self.theta {
            Some(theta) => config.with_theta(theta),
            None => config,
        }
    }
}

fn build_learner(mut s: Section, errors: &mut Vec<String>) -> Option<LearnerSpec> {
    let kind = s.required("kind", errors).and(s.str("kind", errors)).and_then(|k| match k {
        "hedge" => Some(LearnerKind::Hedge),
        "tuned_hedge" => Some(LearnerKind::TunedHedge),
        "optimistic_hedge" => Some(LearnerKind::OptimisticHedge),
        "noisy_hedge" => Some(LearnerKind::NoisyHedge),
        "log_barrier_bandit" => Some(LearnerKind::LogBarrierBandit),
        other => {
            errors.push(format!(
                "`{}` = {other:?} is not one of hedge, tuned_hedge, optimistic_hedge, noisy_hedge, log_barrier_bandit",
                s.name("kind")
            ));
            None
        }
    });
    let epsilon = s.required("epsilon", errors).and(s.f64("epsilon", errors));
    if let Some(e) = epsilon {
        if !(e > 0.0 && e < 1.0) {
            range_error(errors, &s.name("epsilon"), e, "(0, 1)");
        }
    }
    let eta = s.f64("eta", errors);
    if let Some(e) = eta {
        if !(e > 0.0) {
            range_error(errors, &s.name("eta"), e, "(0, inf)");
        }
    }
    let theta = s.f64("theta", errors);
    if let Some(t) = theta {
        if !(0.0..=1.0).contains(&t) {
            range_error(errors, &s.name("theta"), t, "[0, 1]");
        }
    }
    s.finish(errors);
    Some(LearnerSpec { kind: kind?, epsilon: epsilon?, eta, theta })
}

fn parse_comparator(text: &str) -> Option<Comparator> {
    match text {
        "fixed" => Some(Comparator::Fixed),
        "stable" => Some(Comparator::Stable),
        _ => text.strip_prefix("shifting:")?.parse().ok().map(Comparator::ShiftingK),
    }
}

fn build_certificates(mut s: Section, errors: &mut Vec<String>) -> Option<CertificateSpec> {
    let mut certs = CertificateSpec::default();
    if let Some(v) = s.get("lar") {
        match v.as_array() {
            Some(items) => {
                for item in items {
                    match item.as_str().and_then(parse_comparator) {
                        Some(c) => certs.lar.push(c),
                        None => errors.push(format!(
                            "`certificates.lar` entry {item} is not one of \"fixed\", \"stable\", \"shifting:K\""
                        )),
                    }
                }
            }
            None => errors.push("`certificates.lar` must be an array of strings".into()),
        }
    }
    certs.a_budget = s.f64("a_budget", errors);
    if let Some(a) = certs.a_budget {
        if !(a >= 0.0) {
            range_error(errors, "certificates.a_budget", a, "[0, inf)");
        }
    }
    certs.efficiency = s.bool("efficiency", errors).unwrap_or(false);
    certs.hp_delta = s.f64("hp_delta", errors);
    if let Some(delta) = certs.hp_delta {
        if !(delta > 0.0 && delta < 1.0) {
            range_error(errors, "certificates.hp_delta", delta, "(0, 1)");
        }
    }
    certs.dynamic = s.bool("dynamic", errors).unwrap_or(false);
    let lambda = s.f64("lambda", errors);
    let mu = s.f64("mu", errors);
    certs.smoothness = match (lambda, mu) {
        (Some(l), Some(m)) => Some((l, m)),
        (None, None) => None,
        _ => {
            errors.push("`certificates.lambda` and `certificates.mu` go together".into());
            None
        }
    };
    certs.verify_smoothness = s.bool("verify_smoothness", errors).unwrap_or(false);
    certs.uniform_freeze = s.bool("uniform_freeze", errors).unwrap_or(false);
    s.finish(errors);
    Some(certs)
}

fn build_output(mut s: Section, errors: &mut Vec<String>) -> Option<OutputSpec> {
    let dir = s.str("dir", errors).unwrap_or("out");
    let stride = s.uint("stride", errors).unwrap_or(1);
    if stride == 0 {
        range_error(errors, "output.stride", 0, "[1, inf)");
    }
    let dump_distributions = s.bool("dump_distributions", errors).unwrap_or(false);
    s.finish(errors);
    Some(OutputSpec { dir: PathBuf::from(dir), stride: stride.max(1) as usize, dump_distributions })
}
