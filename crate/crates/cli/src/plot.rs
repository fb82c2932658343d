//! Deterministic SVG rendering of training curves.
//!
//! Each curve contributes a translucent raw polyline and a solid
//! moving-average path; an optional dashed horizontal line marks the greedy
//! reference. All coordinates are formatted to fixed precision and inputs
//! are rendered in argument order, so identical inputs produce identical
//! bytes.

use std::fmt::Write as _;

use crate::curves::{moving_average, ParsedCurve, THRESHOLD_WINDOW};
use crate::error::{HarnessError, Result};

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

struct Scales {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Scales {
    fn x(&self, epoch: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN_LEFT + (epoch - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN_BOTTOM
            - (value - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

/// Renders curves (raw + moving average) and an optional reference level to
/// an SVG document string.
pub fn emit_plot(curves: &[ParsedCurve], greedy_mean: Option<f64>, title: &str) -> Result<String> {
    if curves.is_empty() {
        return Err(HarnessError::InvalidArgument("plotting needs at least one curve".into()));
    }
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut x_max: f64 = 1.0;
    for parsed in curves {
        if parsed.curve.records.is_empty() {
            return Err(HarnessError::InvalidArgument(format!(
                "curve {} has no epochs to plot",
                parsed.path.display()
            )));
        }
        for r in &parsed.curve.records {
            y_min = y_min.min(r.mean_return);
            y_max = y_max.max(r.mean_return);
            x_max = x_max.max(r.epoch as f64);
        }
    }
    if let Some(g) = greedy_mean {
        y_min = y_min.min(g);
        y_max = y_max.max(g);
    }
    let pad = ((y_max - y_min) * 0.05).max(0.1);
    let scales =
        Scales { x_min: 1.0, x_max, y_min: y_min - pad, y_max: y_max + pad };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{}</text>",
        MARGIN_LEFT,
        escape(title)
    );

    // Axes.
    let x0 = scales.x(scales.x_min);
    let x1 = scales.x(scales.x_max);
    let y0 = scales.y(scales.y_min);
    let y1 = scales.y(scales.y_max);
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">epoch {:.0}</text>",
        x1 - 60.0,
        y0 + 35.0,
        scales.x_max
    );
    for (value, label_y) in [(scales.y_min, y0), (scales.y_max, y1)] {
        let _ = writeln!(
            svg,
            "<text x=\"4\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{:.2}</text>",
            label_y + 4.0,
            value
        );
    }

    if let Some(g) = greedy_mean {
        let gy = scales.y(g);
        let _ = writeln!(
            svg,
            "<line x1=\"{x0:.2}\" y1=\"{gy:.2}\" x2=\"{x1:.2}\" y2=\"{gy:.2}\" stroke=\"black\" stroke-dasharray=\"6,4\"/>"
        );
    }

    for (idx, parsed) in curves.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let returns = parsed.curve.mean_returns();

        let mut points = String::new();
        for (i, r) in returns.iter().enumerate() {
            let _ = write!(points, "{:.2},{:.2} ", scales.x((i + 1) as f64), scales.y(*r));
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-opacity=\"0.35\"/>",
            points.trim_end()
        );

        let smoothed = moving_average(&returns, THRESHOLD_WINDOW);
        let mut path = String::new();
        for (i, v) in smoothed.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2} {:.2} ", scales.x((i + 1) as f64), scales.y(*v));
        }
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>",
            path.trim_end()
        );
    }

    // Legend: one entry per curve, plus the reference when drawn.
    let legend_x = WIDTH - MARGIN_RIGHT + 14.0;
    for (idx, parsed) in curves.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 16.0 * idx as f64 + 10.0;
        let label = parsed
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("curve {idx}"));
        let _ = writeln!(
            svg,
            "<rect x=\"{legend_x:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>",
            y - 9.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"monospace\" font-size=\"12\">{} (seed {})</text>",
            legend_x + 16.0,
            escape(&label),
            parsed.curve.seed
        );
    }
    if greedy_mean.is_some() {
        let y = MARGIN_TOP + 16.0 * curves.len() as f64 + 10.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"monospace\" font-size=\"12\">greedy reference</text>",
            legend_x + 16.0
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use setpool_ppo::{EpochRecord, TrainingCurve};
    use std::path::PathBuf;

    fn curve_of(returns: &[f64], seed: u64, name: &str) -> ParsedCurve {
        let mut curve = TrainingCurve::new(seed);
        for (i, &r) in returns.iter().enumerate() {
            curve.records.push(EpochRecord {
                epoch: i + 1,
                mean_return: r,
                mean_episode_len: 10.0,
                policy_loss: 0.0,
                value_loss: 0.0,
            });
        }
        ParsedCurve { path: PathBuf::from(format!("{name}.csv")), curve }
    }

    #[test]
    fn two_point_curve_renders_one_polyline_and_the_reference() {
        let svg =
            emit_plot(&[curve_of(&[-1.0, 0.5], 3, "run")], Some(0.8), "demo").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert!(svg.contains("run (seed 3)"));
    }

    #[test]
    fn identical_inputs_produce_identical_bytes() {
        let curves =
            [curve_of(&[0.0, 1.0, 2.0], 1, "a"), curve_of(&[2.0, 1.0, 0.0], 2, "b")];
        let once = emit_plot(&curves, Some(1.5), "same").unwrap();
        let twice = emit_plot(&curves, Some(1.5), "same").unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn five_curves_get_five_legend_entries() {
        let curves: Vec<ParsedCurve> =
            (0..5).map(|i| curve_of(&[i as f64, 1.0], i as u64, &format!("s{i}"))).collect();
        let svg = emit_plot(&curves, None, "five").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
        for i in 0..5 {
            assert!(svg.contains(&format!("s{i} (seed {i})")));
        }
        assert!(!svg.contains("greedy reference"));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(emit_plot(&[], Some(0.0), "x").is_err());
        let empty = ParsedCurve { path: PathBuf::from("e.csv"), curve: TrainingCurve::new(0) };
        assert!(emit_plot(&[empty], None, "x").is_err());
    }
}
