//! Static SVG charts over result files.
//!
//! * `env-bars`: grouped bars of each metric per environment and strategy.
//! * `density-lines`: each metric against base station density, one line per strategy.
//! * `tradeoff`: handover frequency against outage probability, one point per
//!   strategy and density.
//! * `hsm`: each metric against the safety margin, one line per strategy.
//!
//! Rows sharing the plotted keys are averaged.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Result, SimError};
use crate::report::{read_metric_rows, write_file, MetricRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    EnvBars,
    DensityLines,
    Tradeoff,
    Hsm,
}

impl FromStr for PlotKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "env-bars" => Ok(PlotKind::EnvBars),
            "density-lines" => Ok(PlotKind::DensityLines),
            "tradeoff" => Ok(PlotKind::Tradeoff),
            "hsm" => Ok(PlotKind::Hsm),
            other => Err(SimError::invalid("kind", format!("unknown plot kind `{other}`"))),
        }
    }
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::EnvBars => "env-bars",
            PlotKind::DensityLines => "density-lines",
            PlotKind::Tradeoff => "tradeoff",
            PlotKind::Hsm => "hsm",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Metric {
    HandoverFrequency,
    OutageProbability,
}

impl Metric {
    const BOTH: [Metric; 2] = [Metric::HandoverFrequency, Metric::OutageProbability];

    fn of(self, row: &MetricRow) -> f64 {
        match self {
            Metric::HandoverFrequency => row.handover_frequency,
            Metric::OutageProbability => row.outage_probability,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::HandoverFrequency => "Handover frequency (1/s)",
            Metric::OutageProbability => "Outage probability",
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Metric::HandoverFrequency => "hf",
            Metric::OutageProbability => "op",
        }
    }
}

/// Keys in first-seen order.
fn ordered<K: PartialEq + Clone>(keys: impl Iterator<Item = K>) -> Vec<K> {
    let mut out: Vec<K> = Vec::new();
    for k in keys {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

fn mean_where(rows: &[MetricRow], pred: impl Fn(&MetricRow) -> bool, value: impl Fn(&MetricRow) -> f64) -> Option<f64> {
    let picked: Vec<f64> = rows.iter().filter(|r| pred(r)).map(value).collect();
    if picked.is_empty() {
        None
    } else {
        Some(picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn new(x_min: f64, x_max: f64, y_max: f64) -> Self {
        let (x_min, x_max) = if x_max > x_min {
            (x_min, x_max)
        } else {
            (x_min - 1.0, x_min + 1.0)
        };
        let y_max = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };
        Frame { x_min, x_max, y_max }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - y / self.y_max * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[(f64, String)]) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#
    );
    for i in 0..=5 {
        let v = frame.y_max * i as f64 / 5.0;
        let y = frame.py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    for (x, label) in x_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 4.0,
            y0 + 18.0,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>
<text transform="translate(18,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, names: &[String]) {
    let x = WIDTH - MARGIN_R + 16.0;
    for (i, name) in names.iter().enumerate() {
        let y = MARGIN_T + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect class="legend" x="{x}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            y - 10.0,
            PALETTE[i % PALETTE.len()],
            x + 18.0,
            y,
            escape(name)
        );
    }
}

fn bar_chart(
    title: &str,
    groups: &[String],
    series: &[String],
    value: impl Fn(&str, &str) -> Option<f64>,
    y_label: &str,
) -> String {
    let y_max = groups
        .iter()
        .flat_map(|g| series.iter().filter_map(|s| value(g, s)).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let frame = Frame::new(0.0, groups.len() as f64, y_max);
    let slot = (WIDTH - MARGIN_L - MARGIN_R) / groups.len().max(1) as f64;
    let bar_w = slot * 0.8 / series.len().max(1) as f64;
    let ticks: Vec<(f64, String)> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (frame.px(i as f64 + 0.5), g.clone()))
        .collect();
    let mut out = String::new();
    open_svg(&mut out, title);
    axes(&mut out, &frame, "Environment", y_label, &ticks);
    for (gi, g) in groups.iter().enumerate() {
        for (si, s) in series.iter().enumerate() {
            let Some(v) = value(g, s) else { continue };
            let x = frame.px(gi as f64) + slot * 0.1 + bar_w * si as f64;
            let y = frame.py(v);
            let _ = writeln!(
                out,
                r#"<rect class="bar" data-group="{}" data-series="{}" x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{:.2}" fill="{}"/>"#,
                escape(g),
                escape(s),
                frame.py(0.0) - y,
                PALETTE[si % PALETTE.len()]
            );
        }
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let xs: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).collect();
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y_max = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.1))
        .fold(0.0, f64::max);
    let frame = Frame::new(x_min, x_max, y_max);
    let ticks: Vec<(f64, String)> = ordered(xs.iter().map(|x| x.to_bits()))
        .into_iter()
        .map(f64::from_bits)
        .map(|x| (frame.px(x), fmt_tick(x)))
        .collect();
    let mut out = String::new();
    open_svg(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, &ticks);
    for (i, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-series="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            escape(name),
            coords.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                frame.px(x),
                frame.py(y)
            );
        }
    }
    let names: Vec<String> = series.iter().map(|(n, _)| n.clone()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

/// A named series of labelled (x, y) points.
type LabelledSeries = (String, Vec<(f64, f64, String)>);

fn scatter(title: &str, series: &[LabelledSeries]) -> String {
    let x_max = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.0))
        .fold(0.0, f64::max);
    let y_max = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.1))
        .fold(0.0, f64::max);
    let frame = Frame::new(0.0, if x_max > 0.0 { x_max * 1.1 } else { 1.0 }, y_max);
    let ticks: Vec<(f64, String)> = (0..=5)
        .map(|i| frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 5.0)
        .map(|x| (frame.px(x), fmt_tick(x)))
        .collect();
    let mut out = String::new();
    open_svg(&mut out, title);
    axes(
        &mut out,
        &frame,
        Metric::HandoverFrequency.label(),
        Metric::OutageProbability.label(),
        &ticks,
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for (x, y, tag) in points {
            let _ = writeln!(
                out,
                r#"<circle class="point" data-series="{}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}" font-size="9">{}</text>"#,
                escape(name),
                frame.px(*x),
                frame.py(*y),
                frame.px(*x) + 5.0,
                frame.py(*y) - 5.0,
                escape(tag)
            );
        }
    }
    let names: Vec<String> = series.iter().map(|(n, _)| n.clone()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

/// Renders a chart kind; returns `(file suffix, svg document)` pairs.
pub fn render(kind: PlotKind, rows: &[MetricRow]) -> Vec<(String, String)> {
    let strategies = ordered(rows.iter().map(|r| r.strategy.clone()));
    match kind {
        PlotKind::EnvBars => {
            let envs = ordered(rows.iter().map(|r| r.environment.clone()));
            Metric::BOTH
                .iter()
                .map(|&m| {
                    let svg = bar_chart(
                        &format!("{} by environment", m.label()),
                        &envs,
                        &strategies,
                        |g, s| mean_where(rows, |r| r.environment == g && r.strategy == s, |r| m.of(r)),
                        m.label(),
                    );
                    (m.suffix().to_string(), svg)
                })
                .collect()
        }
        PlotKind::DensityLines | PlotKind::Hsm => {
            let (key, x_label): (fn(&MetricRow) -> f64, &str) = if kind == PlotKind::Hsm {
                (|r| r.delta_hsm, "Safety margin (dB)")
            } else {
                (|r| r.gbs_density, "Base station density (1/km²)")
            };
            let mut xs = ordered(rows.iter().map(|r| key(r).to_bits()));
            xs.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
            Metric::BOTH
                .iter()
                .map(|&m| {
                    let series: Vec<(String, Vec<(f64, f64)>)> = strategies
                        .iter()
                        .map(|s| {
                            let points = xs
                                .iter()
                                .filter_map(|&b| {
                                    let x = f64::from_bits(b);
                                    mean_where(rows, |r| &r.strategy == s && key(r) == x, |r| m.of(r)).map(|y| (x, y))
                                })
                                .collect();
                            (s.clone(), points)
                        })
                        .collect();
                    (
                        m.suffix().to_string(),
                        line_chart(&format!("{} vs {x_label}", m.label()), x_label, m.label(), &series),
                    )
                })
                .collect()
        }
        PlotKind::Tradeoff => {
            let mut densities = ordered(rows.iter().map(|r| r.gbs_density.to_bits()));
            densities.sort_by(|a, b| f64::from_bits(*a).total_cmp(&f64::from_bits(*b)));
            let series: Vec<LabelledSeries> = strategies
                .iter()
                .map(|s| {
                    let points = densities
                        .iter()
                        .filter_map(|&b| {
                            let d = f64::from_bits(b);
                            let pick = |r: &MetricRow| &r.strategy == s && r.gbs_density == d;
                            let hf = mean_where(rows, pick, |r| r.handover_frequency)?;
                            let op = mean_where(rows, pick, |r| r.outage_probability)?;
                            Some((hf, op, format!("{}", d)))
                        })
                        .collect();
                    (s.clone(), points)
                })
                .collect();
            vec![(String::new(), scatter("Handovers vs outage by density", &series))]
        }
    }
}

/// Reads `input`, renders `kind` and writes the SVG files into `out_dir`
/// as `<stem>-<kind>[-<metric>].svg`. Returns the written paths.
pub fn plot_file(input: &Path, kind: PlotKind, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_metric_rows(input)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let mut written = Vec::new();
    for (suffix, svg) in render(kind, &rows) {
        let name = if suffix.is_empty() {
            format!("{stem}-{}.svg", kind.name())
        } else {
            format!("{stem}-{}-{suffix}.svg", kind.name())
        };
        let path = out_dir.join(name);
        write_file(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
