//! Minimal static SVG charts. Output depends only on the input, so the same
//! series always render to the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Bar,
    Line,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bar" => Ok(PlotKind::Bar),
            "line" => Ok(PlotKind::Line),
            other => Err(Error::invalid(format!("unknown plot kind `{other}`"))),
        }
    }
}

/// Named values over categorical x positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(String, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(String, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub title: String,
    pub y_label: String,
    pub kind: PlotKind,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Category labels in first-seen order across all series.
fn categories(series: &[Series]) -> Vec<&str> {
    let mut cats: Vec<&str> = Vec::new();
    for s in series {
        for (x, _) in &s.points {
            if !cats.contains(&x.as_str()) {
                cats.push(x);
            }
        }
    }
    cats
}

/// Round axis maximum: 1, 2 or 5 times a power of ten.
fn nice_max(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&m| m >= v)
        .unwrap_or(10.0 * mag)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn render_svg(chart: &Chart) -> Result<String> {
    if chart.series.is_empty() || chart.series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::invalid(format!("chart `{}` has no data", chart.title)));
    }
    if chart.series.iter().flat_map(|s| &s.points).any(|(_, y)| !y.is_finite()) {
        return Err(Error::invalid(format!("chart `{}` has non-finite values", chart.title)));
    }
    let cats = categories(&chart.series);
    let lo = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::min);
    let hi = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let y_max = nice_max(hi);
    let y_min = if lo < 0.0 { -nice_max(-lo) } else { 0.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_of = |v: f64| TOP + plot_h * (y_max - v) / (y_max - y_min);
    let slot = plot_w / cats.len() as f64;
    let x_of = |i: usize| LEFT + slot * (i as f64 + 0.5);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * k as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333333"/>"##,
        y_of(0.0),
        LEFT + plot_w,
        y_of(0.0)
    );
    for (i, c) in cats.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x_of(i),
            TOP + plot_h + 18.0,
            escape(c)
        );
    }

    let n_series = chart.series.len();
    for (si, s) in chart.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="series" data-name="{}">"#, escape(&s.name));
        let idx = |x: &str| cats.iter().position(|c| *c == x).expect("category collected");
        match chart.kind {
            PlotKind::Bar => {
                let bar_w = slot * 0.8 / n_series as f64;
                for (x, y) in &s.points {
                    let left = x_of(idx(x)) - slot * 0.4 + bar_w * si as f64;
                    let (top, bottom) = (y_of(y.max(0.0)), y_of(y.min(0.0)));
                    let _ = writeln!(
                        svg,
                        r#"<rect x="{left:.2}" y="{top:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"><title>{}: {}</title></rect>"#,
                        bottom - top,
                        escape(x),
                        y
                    );
                }
            }
            PlotKind::Line => {
                let coords: Vec<String> = s
                    .points
                    .iter()
                    .map(|(x, y)| format!("{:.2},{:.2}", x_of(idx(x)), y_of(*y)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    coords.join(" ")
                );
                for (x, y) in &s.points {
                    let _ = writeln!(
                        svg,
                        r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"><title>{}: {}</title></circle>"#,
                        x_of(idx(x)),
                        y_of(*y),
                        escape(x),
                        y
                    );
                }
            }
        }
        let ly = TOP + 16.0 * si as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - RIGHT + 12.0,
            ly,
            WIDTH - RIGHT + 26.0,
            ly + 9.0,
            escape(&s.name)
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(chart: &Chart, path: &Path) -> Result<()> {
    let svg = render_svg(chart)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(kind: PlotKind, points: Vec<(String, f64)>) -> Chart {
        Chart {
            title: "Parse <counts>".into(),
            y_label: "count".into(),
            kind,
            series: vec![Series::new("ETLCH", points)],
        }
    }

    #[test]
    fn parse_count_line_has_four_markers() {
        let pts = [(100, 144.0), (300, 267.0), (500, 282.0), (1000, 288.0)]
            .iter()
            .map(|(s, c)| (s.to_string(), *c))
            .collect();
        let svg = render_svg(&chart(PlotKind::Line, pts)).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 4);
        assert!(svg.contains("Parse &lt;counts&gt;"));
    }

    #[test]
    fn single_point_single_bar() {
        let svg = render_svg(&chart(PlotKind::Bar, vec![("x".into(), 0.5)])).unwrap();
        assert_eq!(svg.matches("<title>").count(), 1);
    }

    #[test]
    fn deterministic_and_rejects_empty() {
        let c = chart(PlotKind::Bar, vec![("a".into(), 0.25), ("b".into(), -0.5)]);
        assert_eq!(render_svg(&c).unwrap(), render_svg(&c).unwrap());
        assert!(render_svg(&chart(PlotKind::Bar, vec![])).is_err());
        assert!(render_svg(&chart(PlotKind::Bar, vec![("a".into(), f64::NAN)])).is_err());
    }

    #[test]
    fn nice_axis() {
        assert_eq!(nice_max(288.0), 500.0);
        assert_eq!(nice_max(0.93), 1.0);
        assert_eq!(nice_max(1.0), 1.0);
    }
}
