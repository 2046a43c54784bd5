//! Minimal standalone SVG line charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 45.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Fixed y range; derived from the data when `None`.
    pub y_range: Option<(f64, f64)>,
}

impl PlotSpec {
    pub fn accuracy(title: impl Into<String>) -> Self {
        PlotSpec {
            title: title.into(),
            x_label: "t".into(),
            y_label: "window accuracy".into(),
            y_range: Some((0.0, 1.0)),
        }
    }

    pub fn tracking(title: impl Into<String>) -> Self {
        PlotSpec {
            title: title.into(),
            x_label: "t".into(),
            y_label: "tracking error".into(),
            y_range: None,
        }
    }
}

/// Linear map of `v` from `[lo, hi]` onto `[a, b]`.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    a + (v - lo) / (hi - lo) * (b - a)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(spec: &PlotSpec, series: &[Series]) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(Error::invalid("series", "nothing to plot"));
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = spec.y_range.unwrap_or_else(|| bounds(all().map(|p| p.1)));
    let (px0, px1) = (LEFT, WIDTH - RIGHT);
    let (py0, py1) = (HEIGHT - BOTTOM, TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        (px0 + px1) / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}"/><line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}"/></g>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (xp, yp) = (scale(xv, x0, x1, px0, px1), scale(yv, y0, y1, py0, py1));
        let _ = writeln!(
            svg,
            r#"<text x="{xp}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            py0 + 16.0,
            format_tick(xv),
            px0 - 6.0,
            yp + 4.0,
            format_tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 8.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">{1}</text>"#,
        (py0 + py1) / 2.0,
        escape(&spec.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            if !y.is_finite() {
                continue;
            }
            let y = y.clamp(y0, y1);
            let _ = write!(
                pts,
                "{:.2},{:.2} ",
                scale(x, x0, x1, px0, px1),
                scale(y, y0, y1, py0, py1)
            );
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.trim_end()
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{4}</text></g>"#,
            px1 + 12.0,
            px1 + 32.0,
            px1 + 38.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

pub fn emit_plot(spec: &PlotSpec, series: &[Series], path: &Path) -> Result<()> {
    let svg = render_svg(spec, series)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
