//! Machine-readable tables and standalone SVG charts for run results.
//!
//! Emission never alters numbers: the CSV cell text and the `title`
//! attribute on the corresponding SVG element come from the same
//! formatting, so the two artifacts always agree. Output is
//! byte-deterministic for identical input.

use crate::datamodel::{BenchmarkEntry, GenerationRecord};
use crate::metrics::SweepResult;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("generation references unknown benchmark entry {0:?}")]
    UnknownEntry(String),
    #[error("inconsistent record for entry {0:?}: {1}")]
    Inconsistent(String, String),
    #[error("nothing to plot")]
    Empty,
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One generation plotted against its target length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub target_len: usize,
    pub ratio: f64,
    pub violation: bool,
}

/// Join generations to benchmark entries: one point per successful
/// generation, ordered by entry id. Failed records carry no length and are
/// skipped. A generation without a matching entry is an error, as is a
/// violation flag that disagrees with the recomputed arithmetic.
pub fn scatter_data(
    bench: &[BenchmarkEntry],
    gens: &[GenerationRecord],
) -> Result<Vec<ScatterPoint>, ReportError> {
    let targets: HashMap<&str, usize> =
        bench.iter().map(|e| (e.id.as_str(), e.target_len)).collect();
    let mut ordered: Vec<&GenerationRecord> = gens.iter().collect();
    ordered.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));

    let mut points = Vec::with_capacity(ordered.len());
    for gen in ordered {
        let target_len = *targets
            .get(gen.entry_id.as_str())
            .ok_or_else(|| ReportError::UnknownEntry(gen.entry_id.clone()))?;
        if gen.failed {
            continue;
        }
        let violation = gen.word_count > target_len;
        if violation != gen.violation {
            return Err(ReportError::Inconsistent(
                gen.entry_id.clone(),
                format!(
                    "violation flag {} but word_count {} against target {target_len}",
                    gen.violation, gen.word_count
                ),
            ));
        }
        points.push(ScatterPoint {
            target_len,
            ratio: gen.word_count as f64 / target_len as f64,
            violation,
        });
    }
    Ok(points)
}

fn fmt_ratio(ratio: f64) -> String {
    format!("{ratio:.4}")
}

fn fmt_rate(value: f64) -> String {
    format!("{value:.1}")
}

fn scatter_row(point: &ScatterPoint) -> String {
    format!(
        "{},{},{}",
        point.target_len,
        fmt_ratio(point.ratio),
        point.violation
    )
}

/// CSV with header `target_len,ratio,violation`.
pub fn scatter_csv(points: &[ScatterPoint]) -> String {
    let mut out = String::from("target_len,ratio,violation\n");
    for point in points {
        out.push_str(&scatter_row(point));
        out.push('\n');
    }
    out
}

fn sweep_row(point: &crate::datamodel::EvalSummary, series: &str) -> String {
    let win = point.win_rate.map(fmt_rate).unwrap_or_default();
    format!(
        "{},{},{win},{},{series}",
        point.scale,
        fmt_rate(point.violation_rate),
        fmt_rate(point.mean_words)
    )
}

/// CSV with header `scale,violation_rate,win_rate,mean_words,series`;
/// the win_rate cell is empty where no baseline/judge was available.
pub fn sweep_csv(result: &SweepResult, series: &str) -> String {
    let mut out = String::from("scale,violation_rate,win_rate,mean_words,series\n");
    for point in &result.points {
        out.push_str(&sweep_row(point, series));
        out.push('\n');
    }
    out
}

const CHART_WIDTH: f64 = 640.0;
const CHART_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (v - self.x_min) / span * (CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        CHART_HEIGHT - MARGIN_BOTTOM
            - (v - self.y_min) / span * (CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn svg_header(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {CHART_WIDTH} {CHART_HEIGHT}\" \
         width=\"{CHART_WIDTH}\" height=\"{CHART_HEIGHT}\">\n"
    ));
    out.push_str(
        "<style>\
         .ok{fill:#3b6fd4;}\
         .violation{fill:#d43b3b;}\
         .ok-line{stroke:#3b6fd4;fill:none;stroke-width:2;}\
         .violation-line{stroke:#d43b3b;fill:none;stroke-width:2;}\
         .axis{stroke:#333;stroke-width:1;}\
         .grid{stroke:#ccc;stroke-width:0.5;stroke-dasharray:4 4;}\
         text{font-family:sans-serif;font-size:12px;fill:#333;}\
         </style>\n",
    );
}

fn svg_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)]) {
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\"/>"
    );
    let _ = writeln!(
        out,
        "<line class=\"axis\" x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\"/>"
    );
    for (v, label) in x_ticks {
        let x = frame.x(*v);
        let _ = writeln!(
            out,
            "<line class=\"axis\" x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{label}</text>",
            y0 + 20.0
        );
    }
    for (v, label) in y_ticks {
        let y = frame.y(*v);
        let _ = writeln!(
            out,
            "<line class=\"grid\" x1=\"{x0:.2}\" y1=\"{y:.2}\" x2=\"{x1:.2}\" y2=\"{y:.2}\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>",
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        CHART_HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Scatter chart of length ratios against target lengths. Each circle's
/// `title` attribute repeats its CSV row; violations use the violation
/// style class and a dashed line marks ratio 1.
pub fn scatter_svg(points: &[ScatterPoint]) -> Result<String, ReportError> {
    if points.is_empty() {
        return Err(ReportError::Empty);
    }
    let x_max = points.iter().map(|p| p.target_len).max().unwrap() as f64 * 1.05;
    let y_max = points
        .iter()
        .map(|p| p.ratio)
        .fold(1.2_f64, f64::max)
        * 1.05;
    let frame = Frame {
        x_min: 0.0,
        x_max,
        y_min: 0.0,
        y_max,
    };
    let x_ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| {
            let v = x_max * f64::from(i) / 5.0;
            (v, format!("{}", v.round() as i64))
        })
        .collect();
    let y_ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| {
            let v = y_max * f64::from(i) / 5.0;
            (v, format!("{v:.1}"))
        })
        .collect();

    let mut out = String::new();
    svg_header(&mut out);
    svg_axes(
        &mut out,
        &frame,
        "target length (words)",
        "generated / target length",
        &x_ticks,
        &y_ticks,
    );
    // Reference line at ratio 1: everything above violates.
    let _ = writeln!(
        out,
        "<line class=\"grid\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" style=\"stroke:#888;\"/>",
        frame.x(0.0),
        frame.y(1.0),
        frame.x(x_max),
        frame.y(1.0)
    );
    for point in points {
        let class = if point.violation { "violation" } else { "ok" };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" title=\"{}\"/>",
            frame.x(point.target_len as f64),
            frame.y(point.ratio),
            scatter_row(point)
        );
    }
    let legend_x = CHART_WIDTH - MARGIN_RIGHT - 150.0;
    let _ = writeln!(
        out,
        "<circle class=\"ok\" cx=\"{legend_x:.2}\" cy=\"{MARGIN_TOP:.2}\" r=\"4\"/>\
         <text x=\"{:.2}\" y=\"{:.2}\">within limit</text>",
        legend_x + 10.0,
        MARGIN_TOP + 4.0
    );
    let _ = writeln!(
        out,
        "<circle class=\"violation\" cx=\"{legend_x:.2}\" cy=\"{:.2}\" r=\"4\"/>\
         <text x=\"{:.2}\" y=\"{:.2}\">violation</text>",
        MARGIN_TOP + 18.0,
        legend_x + 10.0,
        MARGIN_TOP + 22.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Line chart over scale factors: violation rate always, win rate when
/// present. Markers carry their CSV row in the `title` attribute.
pub fn sweep_svg(result: &SweepResult, series: &str) -> Result<String, ReportError> {
    if result.points.is_empty() {
        return Err(ReportError::Empty);
    }
    let frame = Frame {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 100.0,
    };
    let x_ticks: Vec<(f64, String)> = result
        .points
        .iter()
        .map(|p| (p.scale, format!("{}", p.scale)))
        .collect();
    let y_ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| (f64::from(i) * 20.0, format!("{}", i * 20)))
        .collect();

    let mut out = String::new();
    svg_header(&mut out);
    svg_axes(
        &mut out,
        &frame,
        "target length scale",
        "rate (%)",
        &x_ticks,
        &y_ticks,
    );

    let mut draw_series = |values: Vec<(f64, f64)>, class_line: &str, class_dot: &str| {
        if values.is_empty() {
            return;
        }
        let path: Vec<String> = values
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline class=\"{class_line}\" points=\"{}\"/>",
            path.join(" ")
        );
        for ((x, y), point) in values.iter().zip(&result.points) {
            let _ = writeln!(
                out,
                "<circle class=\"{class_dot}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" title=\"{}\"/>",
                frame.x(*x),
                frame.y(*y),
                sweep_row(point, series)
            );
        }
    };

    let violation: Vec<(f64, f64)> = result
        .points
        .iter()
        .map(|p| (p.scale, p.violation_rate))
        .collect();
    draw_series(violation, "violation-line", "violation");

    let wins: Vec<(f64, f64)> = result
        .points
        .iter()
        .filter_map(|p| p.win_rate.map(|w| (p.scale, w)))
        .collect();
    let all_have_wins = wins.len() == result.points.len();
    if all_have_wins {
        draw_series(wins, "ok-line", "ok");
    }

    let legend_x = CHART_WIDTH - MARGIN_RIGHT - 170.0;
    let _ = writeln!(
        out,
        "<circle class=\"violation\" cx=\"{legend_x:.2}\" cy=\"{MARGIN_TOP:.2}\" r=\"4\"/>\
         <text x=\"{:.2}\" y=\"{:.2}\">violation rate ({series})</text>",
        legend_x + 10.0,
        MARGIN_TOP + 4.0
    );
    if all_have_wins {
        let _ = writeln!(
            out,
            "<circle class=\"ok\" cx=\"{legend_x:.2}\" cy=\"{:.2}\" r=\"4\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\">win rate ({series})</text>",
            MARGIN_TOP + 18.0,
            legend_x + 10.0,
            MARGIN_TOP + 22.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Write a text artifact, surfacing failures with the path.
pub fn write_text(content: &str, path: impl AsRef<Path>) -> Result<(), ReportError> {
    let path = path.as_ref();
    std::fs::write(path, content).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}
