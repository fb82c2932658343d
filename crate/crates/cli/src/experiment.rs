//! Batch experiment execution and reporting.
//!
//! One experiment trains `(representation, seed)` runs, writes a curve CSV
//! and an SVG plot, and judges each run against the greedy reference: the
//! run "converged" at the first epoch whose trailing moving average of mean
//! returns reaches `threshold × greedy mean`. The convoy task has no greedy
//! reference, so its runs instead record whether late-training returns
//! improved on early-training returns.

use std::fmt::Write as _;
use std::path::PathBuf;

use setpool_ppo::{Trainer, TrainingCurve};

use crate::config::{ExperimentConfig, ReprKind};
use crate::curves::{epochs_to_threshold, ParsedCurve, THRESHOLD_WINDOW};
use crate::error::{HarnessError, Result};
use crate::greedy::{estimate_greedy_return, GreedyEstimate};
use crate::plot::emit_plot;

/// Early/late window for the improvement judgment on tasks without a greedy
/// reference.
pub const IMPROVEMENT_WINDOW: usize = 100;

/// One `(representation, seed)` training run, summarized.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub representation: ReprKind,
    pub seed: u64,
    /// Mean return over the final threshold window (shorter if the curve is).
    pub final_mean_return: f64,
    pub epochs_run: usize,
    /// First epoch whose moving average reached the target; `None` when the
    /// run never converged or the task has no reference.
    pub epochs_to_threshold: Option<usize>,
    /// Whether late returns beat early returns; `None` for sub-2-epoch curves.
    pub improved: Option<bool>,
    pub diverged_at: Option<usize>,
    pub curve_path: PathBuf,
}

/// Aggregated outcomes, possibly across two representations.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub task_label: String,
    pub threshold: f64,
    pub greedy: Option<GreedyEstimate>,
    pub outcomes: Vec<RunOutcome>,
}

fn mean_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// `true` when the mean of the last window beats the mean of the first; the
/// window is [`IMPROVEMENT_WINDOW`] epochs, shrunk to half the curve when the
/// curve is short.
pub fn improvement_flag(returns: &[f64]) -> Option<bool> {
    if returns.len() < 2 {
        return None;
    }
    let window = IMPROVEMENT_WINDOW.min(returns.len() / 2);
    let early = mean_of(&returns[..window]);
    let late = mean_of(&returns[returns.len() - window..]);
    Some(late > early)
}

/// Output directory for a config, honoring the `SETPOOL_OUTPUT_DIR`
/// environment override.
pub fn resolve_output_dir(config: &ExperimentConfig) -> PathBuf {
    std::env::var_os("SETPOOL_OUTPUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| config.output_dir.clone())
}

fn summarize_run(
    config: &ExperimentConfig,
    curve: &TrainingCurve,
    target: Option<f64>,
    curve_path: PathBuf,
) -> RunOutcome {
    let returns = curve.mean_returns();
    let tail = returns.len().min(THRESHOLD_WINDOW);
    RunOutcome {
        representation: config.representation,
        seed: curve.seed,
        final_mean_return: mean_of(&returns[returns.len() - tail..]),
        epochs_run: returns.len(),
        epochs_to_threshold: target
            .and_then(|t| epochs_to_threshold(&returns, THRESHOLD_WINDOW, t)),
        improved: improvement_flag(&returns),
        diverged_at: curve.diverged_at,
        curve_path,
    }
}

/// Trains every seed of `config`, writing per-seed curve CSVs and one SVG
/// plot under the resolved output directory. Divergent seeds are recorded in
/// their outcome rows; the batch keeps going.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonReport> {
    config.validate()?;
    let out_dir = resolve_output_dir(config);
    std::fs::create_dir_all(&out_dir).map_err(|e| HarnessError::io(&out_dir, e))?;

    let greedy = if config.task.has_greedy_reference() {
        Some(estimate_greedy_return(
            config.task,
            config.object_count,
            config.greedy_episodes,
            config.greedy_seed,
        )?)
    } else {
        None
    };
    let target = greedy.as_ref().map(|g| g.mean * config.threshold);

    let slug = config.slug();
    let mut outcomes = Vec::with_capacity(config.seeds.len());
    let mut plotted = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let mut train_config = config.train.clone();
        train_config.seed = seed;
        train_config.stop_at_mean_return = if config.early_stop { target } else { None };
        train_config.stop_window = THRESHOLD_WINDOW;

        let mut env = config.make_env(seed)?;
        let mut trainer = Trainer::new(&config.repr_spec()?, env.flat_dim(), train_config)?;
        let curve = trainer.train(env.as_mut())?;

        let curve_path = out_dir.join(format!("curve-{slug}-seed{seed}.csv"));
        std::fs::write(&curve_path, curve.to_csv())
            .map_err(|e| HarnessError::io(&curve_path, e))?;
        outcomes.push(summarize_run(config, &curve, target, curve_path.clone()));
        plotted.push(ParsedCurve { path: curve_path, curve });
    }

    let svg = emit_plot(
        &plotted,
        greedy.as_ref().map(|g| g.mean),
        &format!("{slug}: mean return per epoch"),
    )?;
    let plot_path = out_dir.join(format!("plot-{slug}.svg"));
    std::fs::write(&plot_path, svg).map_err(|e| HarnessError::io(&plot_path, e))?;

    let report = ComparisonReport {
        task_label: format!("{} (m={})", config.task.as_str(), config.object_count),
        threshold: config.threshold,
        greedy,
        outcomes,
    };
    let report_path = out_dir.join(format!("report-{slug}.csv"));
    std::fs::write(&report_path, report.to_csv())
        .map_err(|e| HarnessError::io(&report_path, e))?;
    let summary_path = out_dir.join(format!("summary-{slug}.txt"));
    std::fs::write(&summary_path, report.to_summary())
        .map_err(|e| HarnessError::io(&summary_path, e))?;
    Ok(report)
}

/// Runs two configs that must describe the same task and merges their
/// outcomes into one report sharing a single greedy reference.
pub fn compare(a: &ExperimentConfig, b: &ExperimentConfig) -> Result<ComparisonReport> {
    if a.task != b.task || a.object_count != b.object_count {
        return Err(HarnessError::InvalidArgument(format!(
            "cannot compare different tasks: {} (m={}) vs {} (m={})",
            a.task.as_str(),
            a.object_count,
            b.task.as_str(),
            b.object_count
        )));
    }
    if (a.threshold, a.greedy_episodes, a.greedy_seed)
        != (b.threshold, b.greedy_episodes, b.greedy_seed)
    {
        return Err(HarnessError::InvalidArgument(
            "compared configs must share threshold and greedy settings".into(),
        ));
    }
    let report_a = run_experiment(a)?;
    let report_b = run_experiment(b)?;
    let mut merged = report_a;
    merged.outcomes.extend(report_b.outcomes);

    let out_dir = resolve_output_dir(a);
    let name = format!("comparison-{}-vs-{}", a.slug(), b.slug());
    let csv_path = out_dir.join(format!("{name}.csv"));
    std::fs::write(&csv_path, merged.to_csv()).map_err(|e| HarnessError::io(&csv_path, e))?;
    let txt_path = out_dir.join(format!("{name}.txt"));
    std::fs::write(&txt_path, merged.to_summary())
        .map_err(|e| HarnessError::io(&txt_path, e))?;
    Ok(merged)
}

impl ComparisonReport {
    /// Seeds of `repr` whose runs reached the threshold.
    pub fn converged_seeds(&self, repr: ReprKind) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.representation == repr && o.epochs_to_threshold.is_some())
            .count()
    }

    /// Seeds of `repr` whose late returns improved on early returns.
    pub fn improved_seeds(&self, repr: ReprKind) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.representation == repr && o.improved == Some(true))
            .count()
    }

    pub fn seeds_of(&self, repr: ReprKind) -> usize {
        self.outcomes.iter().filter(|o| o.representation == repr).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "representation,seed,final_mean_return,epochs_run,epochs_to_threshold,improved,diverged_at,greedy_mean,greedy_std,target_return\n",
        );
        let (greedy_mean, greedy_std) = match &self.greedy {
            Some(g) => (g.mean.to_string(), g.std.to_string()),
            None => (String::new(), String::new()),
        };
        let target = self
            .greedy
            .as_ref()
            .map(|g| (g.mean * self.threshold).to_string())
            .unwrap_or_default();
        for o in &self.outcomes {
            let reached = match (&self.greedy, o.epochs_to_threshold) {
                (Some(_), Some(e)) => e.to_string(),
                (Some(_), None) => "not_reached".into(),
                (None, _) => String::new(),
            };
            let improved = match o.improved {
                Some(true) => "yes",
                Some(false) => "no",
                None => "",
            };
            let diverged = o.diverged_at.map(|e| e.to_string()).unwrap_or_default();
            let final_return =
                if o.final_mean_return.is_nan() { String::new() } else { o.final_mean_return.to_string() };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                o.representation.as_str(),
                o.seed,
                final_return,
                o.epochs_run,
                reached,
                improved,
                diverged,
                greedy_mean,
                greedy_std,
                target
            );
        }
        out
    }

    pub fn to_summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task_label);
        match &self.greedy {
            Some(g) => {
                let _ = writeln!(
                    out,
                    "greedy reference: {:.4} ± {:.4} over {} episodes; target = {:.2} × greedy = {:.4}",
                    g.mean,
                    g.std,
                    g.episodes,
                    self.threshold,
                    g.mean * self.threshold
                );
            }
            None => {
                let _ = writeln!(out, "no greedy reference; judging early-vs-late improvement");
            }
        }
        for o in &self.outcomes {
            let verdict = match (&self.greedy, o.epochs_to_threshold, o.improved) {
                (Some(_), Some(e), _) => format!("reached target at epoch {e}"),
                (Some(_), None, _) => "never reached target".to_string(),
                (None, _, Some(true)) => "improved".to_string(),
                (None, _, Some(false)) => "did not improve".to_string(),
                (None, _, None) => "curve too short to judge".to_string(),
            };
            let diverged = match o.diverged_at {
                Some(e) => format!(" [diverged at epoch {e}]"),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "{:>8} seed {}: final mean return {:.4} after {} epochs, {}{}",
                o.representation.as_str(),
                o.seed,
                o.final_mean_return,
                o.epochs_run,
                verdict,
                diverged
            );
        }
        for repr in [ReprKind::Baseline, ReprKind::Encoder] {
            let total = self.seeds_of(repr);
            if total == 0 {
                continue;
            }
            if self.greedy.is_some() {
                let _ = writeln!(
                    out,
                    "{}: {}/{} seeds reached the target",
                    repr.as_str(),
                    self.converged_seeds(repr),
                    total
                );
            } else {
                let _ = writeln!(
                    out,
                    "{}: {}/{} seeds improved",
                    repr.as_str(),
                    self.improved_seeds(repr),
                    total
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improvement_flag_compares_first_and_last_windows() {
        assert_eq!(improvement_flag(&[]), None);
        assert_eq!(improvement_flag(&[1.0]), None);
        assert_eq!(improvement_flag(&[0.0, 1.0]), Some(true));
        assert_eq!(improvement_flag(&[1.0, 0.0]), Some(false));
        let mut long = vec![-1.0; 300];
        long.extend(vec![2.0; 300]);
        assert_eq!(improvement_flag(&long), Some(true));
    }

    #[test]
    fn compare_rejects_mismatched_tasks() {
        let a: ExperimentConfig = toml::from_str("task = \"scavenger1\"").unwrap();
        let mut b = a.clone();
        b.object_count = 5;
        assert!(compare(&a, &b).is_err());
    }
}
