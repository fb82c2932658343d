//! Reading training curves back from disk and judging convergence.

use std::path::{Path, PathBuf};

use setpool_ppo::{EpochRecord, TrainingCurve};

use crate::error::{HarnessError, Result};

/// How many epochs the convergence judgment averages over.
pub const THRESHOLD_WINDOW: usize = 50;

/// A curve parsed from its CSV file, keeping the source path for messages.
#[derive(Debug, Clone)]
pub struct ParsedCurve {
    pub path: PathBuf,
    pub curve: TrainingCurve,
}

/// Parses the `epoch,mean_return,mean_episode_len,policy_loss,value_loss,seed`
/// format written by the trainer. Any malformed line is reported with its
/// 1-based line number.
pub fn parse_curve_csv(path: &Path, text: &str) -> Result<ParsedCurve> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().ok_or_else(|| HarnessError::Csv {
        path: path.into(),
        line: 1,
        detail: "empty file, expected a header row".into(),
    })?;
    if header.1 != "epoch,mean_return,mean_episode_len,policy_loss,value_loss,seed" {
        return Err(HarnessError::Csv {
            path: path.into(),
            line: 1,
            detail: format!("unexpected header '{}'", header.1),
        });
    }
    let mut records = Vec::new();
    let mut seed: Option<u64> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::Csv {
                path: path.into(),
                line: line_no,
                detail: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str, value: &str| HarnessError::Csv {
            path: path.into(),
            line: line_no,
            detail: format!("cannot parse {what} from '{value}'"),
        };
        let epoch: usize = fields[0].parse().map_err(|_| bad("epoch", fields[0]))?;
        let mean_return: f64 =
            fields[1].parse().map_err(|_| bad("mean_return", fields[1]))?;
        let mean_episode_len: f64 =
            fields[2].parse().map_err(|_| bad("mean_episode_len", fields[2]))?;
        let policy_loss: f64 = fields[3].parse().map_err(|_| bad("policy_loss", fields[3]))?;
        let value_loss: f64 = fields[4].parse().map_err(|_| bad("value_loss", fields[4]))?;
        let row_seed: u64 = fields[5].parse().map_err(|_| bad("seed", fields[5]))?;
        if let Some(s) = seed {
            if s != row_seed {
                return Err(HarnessError::Csv {
                    path: path.into(),
                    line: line_no,
                    detail: format!("seed changed mid-file from {s} to {row_seed}"),
                });
            }
        }
        seed = Some(row_seed);
        records.push(EpochRecord { epoch, mean_return, mean_episode_len, policy_loss, value_loss });
    }
    let mut curve = TrainingCurve::new(seed.unwrap_or(0));
    curve.records = records;
    Ok(ParsedCurve { path: path.into(), curve })
}

pub fn load_curve(path: &Path) -> Result<ParsedCurve> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_curve_csv(path, &text)
}

/// Trailing moving average: `out[i]` averages the last `window` values ending
/// at `i`, or fewer while the prefix is shorter than the window.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window > 0, "window must be positive");
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        out.push(sum / (i.min(window - 1) + 1) as f64);
    }
    out
}

/// First 1-based epoch at which the `window`-epoch moving average of
/// `returns` reaches `target`. Epochs earlier than `window` never qualify, so
/// a lucky first epoch cannot count as convergence.
pub fn epochs_to_threshold(returns: &[f64], window: usize, target: f64) -> Option<usize> {
    if returns.len() < window {
        return None;
    }
    let averages = moving_average(returns, window);
    averages
        .iter()
        .enumerate()
        .skip(window - 1)
        .find(|(_, avg)| **avg >= target)
        .map(|(i, _)| i + 1)
}
