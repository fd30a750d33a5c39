//! Deterministic SVG line charts of a run's per-point metrics.

use crate::error::{CliError, Result};
use crate::record::{PointRecord, RunResult};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 64.0;

/// One plotted series: `(x, y, error bar half-width)`.
pub struct Chart {
    pub file_name: &'static str,
    pub title: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub points: Vec<(f64, f64, f64)>,
}

/// The charts of a run: gap against λ with error bars, and the `τ/|log ε|` and
/// `‖I‖` trends against ε.
pub fn charts(records: &[PointRecord]) -> Vec<Chart> {
    let mut by_lambda: Vec<&PointRecord> = records.iter().collect();
    by_lambda.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut by_eps = by_lambda.clone();
    by_eps.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    vec![
        Chart {
            file_name: "gap.svg",
            title: "free-energy gap",
            x_label: "λ",
            y_label: "gap",
            points: by_lambda.iter().map(|r| (r.lambda, r.gap, 2.0 * r.gap_std_error)).collect(),
        },
        Chart {
            file_name: "tau_over_log_eps.svg",
            title: "τ / |log ε|",
            x_label: "ε",
            y_label: "τ / |log ε|",
            points: by_eps.iter().map(|r| (r.epsilon, r.tau / r.epsilon.ln().abs(), 0.0)).collect(),
        },
        Chart {
            file_name: "cross_norm.svg",
            title: "‖I‖ in L²(μ₀)",
            x_label: "ε",
            y_label: "‖I‖",
            points: by_eps.iter().map(|r| (r.epsilon, r.cross_norm, 0.0)).collect(),
        },
    ]
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300_f64.max(1e-12 * hi.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render one chart. A single point is drawn as a marker without a trend line.
pub fn render(chart: &Chart) -> String {
    let (x0, x1) = range(chart.points.iter().map(|p| p.0));
    let (y0, y1) = range(chart.points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(chart.title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{left:.2} {top:.2} V{bottom:.2} H{right:.2}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3e}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3e}</text>"#,
            left - 5.0,
            left - 7.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(chart.y_label)
    );
    if chart.points.len() > 1 {
        let path: Vec<String> = chart
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            s,
            r##"<path class="trend" d="{}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##,
            path.join(" ")
        );
    }
    for &(x, y, err) in &chart.points {
        if err > 0.0 {
            let _ = writeln!(
                s,
                r##"<line class="error-bar" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#555"/>"##,
                sx(x),
                sy(y - err),
                sy(y + err)
            );
        }
        let _ = writeln!(s, r##"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="#1f5fa8"/>"##, sx(x), sy(y));
    }
    s.push_str("</svg>\n");
    s
}

/// Render every chart of the run at `input` into `out_dir`. Nothing is written
/// unless the run has at least one point record.
pub fn run(input: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let result = RunResult::load(input)?;
    if result.records.is_empty() {
        return Err(CliError::Config(format!("{}: run has no point records to plot", input.display())));
    }
    let rendered: Vec<(PathBuf, String)> =
        charts(&result.records).iter().map(|c| (out_dir.join(c.file_name), render(c))).collect();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    for (path, svg) in &rendered {
        std::fs::write(path, svg).map_err(|e| CliError::io(path, e))?;
    }
    Ok(rendered.into_iter().map(|(p, _)| p).collect())
}
