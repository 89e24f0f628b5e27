//! Static SVG charts for sweeps and scenario tables.
//!
//! Output depends only on the input data: no timestamps, no random ids, and
//! coordinates are printed with a fixed number of decimals.

use std::fmt::Write as _;

use greenfabric_core::SweepResult;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Line,
    GroupedBar,
}

pub struct ChartLabels<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
}

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

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

struct Frame {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Frame {
    fn plot_w() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    fn x(&self, v: f64) -> f64 {
        let span = if self.x1 > self.x0 { self.x1 - self.x0 } else { 1.0 };
        LEFT + (v - self.x0) / span * Self::plot_w()
    }

    fn y(&self, v: f64) -> f64 {
        TOP + Self::plot_h() * (1.0 - v / self.y1)
    }
}

fn open(svg: &mut String, labels: &ChartLabels<'_>) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + Frame::plot_w() / 2.0,
        escape(labels.title)
    );
}

fn axes(svg: &mut String, frame: &Frame, labels: &ChartLabels<'_>) {
    let (xa, ya) = (LEFT, TOP + Frame::plot_h());
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{xa:.2}" y1="{ya:.2}" x2="{:.2}" y2="{ya:.2}" stroke="black"/>"#,
        LEFT + Frame::plot_w()
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{xa:.2}" y1="{TOP:.2}" x2="{xa:.2}" y2="{ya:.2}" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let v = frame.y1 * i as f64 / TICKS as f64;
        let y = frame.y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{xa:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            xa - 4.0,
            xa - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{} (dimensionless)</text>"#,
        LEFT + Frame::plot_w() / 2.0,
        HEIGHT - 14.0,
        escape(labels.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{} (dimensionless)</text>"#,
        TOP + Frame::plot_h() / 2.0,
        escape(labels.y_label)
    );
}

fn legend(svg: &mut String, entries: &[&str], swatch_rect: bool) {
    let x = WIDTH - RIGHT + 16.0;
    for (i, label) in entries.iter().enumerate() {
        let y = TOP + 8.0 + 18.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        if swatch_rect {
            let _ = writeln!(
                svg,
                r#"<rect class="swatch" x="{x:.2}" y="{:.2}" width="12" height="10" fill="{color}"/>"#,
                y - 9.0
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<line class="swatch" x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                y - 4.0,
                x + 12.0,
                y - 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.2}" y="{y:.2}">{}</text>"#,
            x + 18.0,
            escape(label)
        );
    }
}

fn y_max(series: &[SweepResult]) -> f64 {
    let top = series
        .iter()
        .flat_map(|s| s.samples().iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    if top > 0.0 { top * 1.1 } else { 1.0 }
}

/// One polyline per series against a shared parameter axis.
pub fn line_chart(series: &[SweepResult], labels: &ChartLabels<'_>) -> Result<String> {
    if series.is_empty() {
        return Err(Error::invalid("chart", "no series to plot"));
    }
    let params = series.iter().flat_map(|s| s.samples().iter().map(|p| p.0));
    let (x0, x1) = params.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)));
    let frame = Frame { x0, x1, y1: y_max(series) };

    let mut svg = String::new();
    open(&mut svg, labels);
    axes(&mut svg, &frame, labels);
    let mut ticks: Vec<f64> = series
        .iter()
        .flat_map(|s| s.samples().iter().map(|p| p.0))
        .collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    if ticks.len() > 11 {
        ticks = (0..=TICKS).map(|i| x0 + (x1 - x0) * i as f64 / TICKS as f64).collect();
    }
    let ya = TOP + Frame::plot_h();
    for t in ticks {
        let x = frame.x(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{ya:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            ya + 4.0,
            ya + 18.0,
            tick_label(t)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let d: Vec<String> = s
            .samples()
            .iter()
            .enumerate()
            .map(|(j, (p, v))| {
                format!("{}{:.2},{:.2}", if j == 0 { "M" } else { "L" }, frame.x(*p), frame.y(*v))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<path class="series" d="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            d.join(" "),
            PALETTE[i % PALETTE.len()]
        );
    }
    let names: Vec<&str> = series.iter().map(SweepResult::label).collect();
    legend(&mut svg, &names, false);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Bars grouped by parameter value, one bar per series within each group.
///
/// Every series must be sampled at the same parameter values.
pub fn grouped_bar_chart(series: &[SweepResult], labels: &ChartLabels<'_>) -> Result<String> {
    let Some(first) = series.first() else {
        return Err(Error::invalid("chart", "no series to plot"));
    };
    let groups: Vec<f64> = first.samples().iter().map(|p| p.0).collect();
    if series
        .iter()
        .any(|s| s.samples().iter().map(|p| p.0).ne(groups.iter().copied()))
    {
        return Err(Error::invalid("chart", "grouped bars need identical parameters in every series"));
    }
    let frame = Frame {
        x0: 0.0,
        x1: groups.len() as f64,
        y1: y_max(series),
    };
    let mut svg = String::new();
    open(&mut svg, labels);
    axes(&mut svg, &frame, labels);

    let slot = Frame::plot_w() / groups.len() as f64;
    let bar_w = slot * 0.8 / series.len() as f64;
    let ya = TOP + Frame::plot_h();
    for (g, param) in groups.iter().enumerate() {
        let left = frame.x(g as f64) + slot * 0.1;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            frame.x(g as f64) + slot / 2.0,
            ya + 18.0,
            tick_label(*param)
        );
        for (i, s) in series.iter().enumerate() {
            let v = s.samples()[g].1;
            let y = frame.y(v);
            let _ = writeln!(
                svg,
                r#"<rect class="bar" x="{:.2}" y="{y:.2}" width="{bar_w:.2}" height="{:.2}" fill="{}"><title>{} {}={}: {v:.2}</title></rect>"#,
                left + bar_w * i as f64,
                ya - y,
                PALETTE[i % PALETTE.len()],
                escape(s.label()),
                escape(labels.x_label),
                tick_label(*param)
            );
        }
    }
    let names: Vec<&str> = series.iter().map(SweepResult::label).collect();
    legend(&mut svg, &names, true);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_chart(kind: ChartKind, series: &[SweepResult], labels: &ChartLabels<'_>) -> Result<String> {
    match kind {
        ChartKind::Line => line_chart(series, labels),
        ChartKind::GroupedBar => grouped_bar_chart(series, labels),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenfabric_core::SweepMetadata;

    fn series(label: &str, pts: &[(f64, f64)]) -> SweepResult {
        SweepResult::new("alpha", "cdc", label, pts.to_vec(), SweepMetadata::default()).unwrap()
    }

    const LABELS: ChartLabels<'static> = ChartLabels {
        title: "t",
        x_label: "alpha",
        y_label: "CDC",
    };

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("A<B & \"C\""), "A&lt;B &amp; &quot;C&quot;");
        assert_eq!(tick_label(0.5), "0.5");
        assert_eq!(tick_label(2.0), "2");
    }

    #[test]
    fn mismatched_groups_rejected() {
        let a = series("a", &[(0.3, 1.0), (0.5, 2.0)]);
        let b = series("b", &[(0.3, 1.0), (0.7, 2.0)]);
        assert!(grouped_bar_chart(&[a, b], &LABELS).is_err());
        assert!(line_chart(&[], &LABELS).is_err());
    }

    #[test]
    fn single_point_line() {
        let svg = line_chart(&[series("only", &[(0.5, 3.0)])], &LABELS).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(!svg.contains("NaN"));
    }
}
