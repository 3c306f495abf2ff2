//! Trajectory CSV, JSON report, and plain-text summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::run::{comparator_label, Header, Report, TrialRecord};
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: PathBuf,
    /// Written only when distributions were recorded.
    pub distributions: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            csv: dir.join("trajectories.csv"),
            json: dir.join("report.json"),
            summary: dir.join("summary.txt"),
            distributions: dir.join("distributions.csv"),
        }
    }
}

/// Seventeen significant digits, locale independent.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn header_block(header: &Header) -> String {
    format!(
        "# schema_version={}\n# config_sha256={}\n# seed={}\n",
        header.schema_version, header.config_sha256, header.seed
    )
}

pub fn trajectory_csv(header: &Header, players: usize, trials: &[TrialRecord]) -> String {
    let mut out = header_block(header);
    out.push_str("trial,t,social_cost,opt,turnovers");
    for i in 0..players {
        let _ = write!(out, ",regret_{i}");
    }
    out.push('\n');
    for record in trials {
        for row in &record.rows {
            let _ = write!(
                out,
                "{},{},{},{},{}",
                record.trial,
                row.t,
                real(row.social_cost),
                real(row.opt),
                row.turnovers
            );
            for r in &row.regret {
                out.push(',');
                out.push_str(&real(*r));
            }
            out.push('\n');
        }
    }
    out
}

pub fn distributions_csv(header: &Header, actions: usize, trials: &[TrialRecord]) -> String {
    let mut out = header_block(header);
    out.push_str("trial,t,player");
    for j in 0..actions {
        let _ = write!(out, ",w_{j}");
    }
    out.push('\n');
    for record in trials {
        for row in &record.rows {
            for (i, w) in row.distributions.iter().enumerate() {
                let _ = write!(out, "{},{},{i}", record.trial, row.t);
                for x in w {
                    out.push(',');
                    out.push_str(&real(*x));
                }
                out.push('\n');
            }
        }
    }
    out
}

pub fn summary_text(report: &Report) -> String {
    let mut out = String::new();
    let h = &report.header;
    let _ = writeln!(out, "config sha256 {} seed {}", h.config_sha256, h.seed);
    let _ = writeln!(
        out,
        "{} players, {} actions, {} rounds, {} trials",
        report.players, report.actions, report.horizon, report.trials
    );
    if let Some(s) = &report.smoothness {
        let verified = match s.verified {
            Some(true) => "verified",
            Some(false) => "NOT verified",
            None => "assumed",
        };
        let _ = writeln!(out, "smoothness ({:.6}, {:.6}) {verified}", s.lambda, s.mu);
    }
    for l in &report.lar {
        let _ = writeln!(
            out,
            "lar[{}]: {}/{} satisfied, worst residual {:.6e}",
            comparator_label(l.comparator),
            l.satisfied,
            l.checked,
            l.worst_residual
        );
    }
    if let Some(e) = &report.efficiency {
        let _ = writeln!(
            out,
            "efficiency: {}/{} trials within {:.6}*OPT + {:.6} (OPT {:.6}, worst average {:.6})",
            e.satisfied_trials, e.trials, e.poa_bound, e.additive_term, e.avg_opt, e.worst_avg_social
        );
    }
    if let Some(hp) = &report.high_probability {
        let _ = writeln!(
            out,
            "high_probability: {} quantile {:.6} against bound {:.6}",
            1.0 - hp.delta,
            hp.quantile,
            hp.bound
        );
    }
    if let Some(d) = &report.dynamic {
        let _ = writeln!(
            out,
            "dynamic: average {:.6} against {:.6}*{:.6} + {:.6} (rho {:.6}, mean sum K {:.3})",
            d.avg_social, d.coefficient, d.avg_opt, d.additive_term, d.rho, d.mean_sum_k
        );
    }
    if let Some(f) = &report.uniform_freeze {
        let _ = writeln!(out, "uniform_freeze: max deviation {:e}", f.max_deviation);
    }
    for failure in &report.failures {
        let _ = writeln!(out, "FAILED {failure}");
    }
    let _ = writeln!(out, "{}", if report.passed { "PASS" } else { "FAIL" });
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.to_path_buf(), e))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes the CSV, the JSON report, the summary, and the distribution
/// sidecar when any trial recorded distributions.
pub fn emit_outputs(trials: &[TrialRecord], report: &Report, paths: &OutputPaths) -> Result<()> {
    write(&paths.csv, &trajectory_csv(&report.header, report.players, trials))?;
    let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
    json.push('\n');
    write(&paths.json, &json)?;
    write(&paths.summary, &summary_text(report))?;
    if trials.iter().any(|r| r.rows.iter().any(|row| !row.distributions.is_empty())) {
        write(&paths.distributions, &distributions_csv(&report.header, report.actions, trials))?;
    }
    Ok(())
}
