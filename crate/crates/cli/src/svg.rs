//! Minimal SVG 1.1 chart of MSE versus `n`.
//!
//! Coordinate transform, with the plot area at `(LEFT, TOP)` of size
//! `PLOT_W × PLOT_H`:
//!
//! ```text
//! x_px = LEFT + (n − n_min) / (n_max − n_min) · PLOT_W
//! y_px = TOP  + (log10(y_max) − log10(v)) / (log10(y_max) − log10(y_min)) · PLOT_H
//! ```
//!
//! `y_min` and `y_max` are whole decades bracketing the finite positive
//! values, with `y_max ≤ 10^4`. Values above `10^4` (including `+∞`) are
//! drawn at the top edge with an upward triangle; zeros and values below
//! `y_min` sit on the bottom edge with a downward triangle. NaN breaks the
//! line.

use std::fmt::Write as _;
use std::path::Path;

use lmmse_core::SweepRecord;

use crate::csv_io::format_float;
use crate::error::CliError;

pub const CLIP_MAX: f64 = 1e4;
pub const WIDTH: f64 = 860.0;
pub const HEIGHT: f64 = 540.0;
pub const LEFT: f64 = 80.0;
pub const TOP: f64 = 50.0;
pub const PLOT_W: f64 = 560.0;
pub const PLOT_H: f64 = 420.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Clip {
    Inside,
    Above,
    Below,
}

#[derive(Debug, Clone, Copy)]
pub struct Axes {
    pub n_min: f64,
    pub n_max: f64,
    /// Decade exponents of the y range.
    pub dec_min: i32,
    pub dec_max: i32,
}

impl Axes {
    fn from_records(records: &[SweepRecord]) -> Axes {
        let (mut n_min, mut n_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for r in records {
            n_min = n_min.min(r.n as f64);
            n_max = n_max.max(r.n as f64);
        }
        if n_max <= n_min {
            n_min -= 1.0;
            n_max += 1.0;
        }
        let plotted = records
            .iter()
            .flat_map(|r| [Some(r.empirical_mse), if r.is_baseline() { None } else { r.analytic_mse }])
            .flatten()
            .filter(|v| v.is_finite() && *v > 0.0 && *v <= CLIP_MAX);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in plotted {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let (mut dec_min, mut dec_max) = if lo.is_finite() {
            (lo.log10().floor() as i32, hi.log10().ceil() as i32)
        } else {
            (-3, 0)
        };
        dec_max = dec_max.min(CLIP_MAX.log10() as i32);
        if dec_max <= dec_min {
            dec_min = dec_max - 1;
        }
        Axes { n_min, n_max, dec_min, dec_max }
    }

    pub fn x(&self, n: f64) -> f64 {
        LEFT + (n - self.n_min) / (self.n_max - self.n_min) * PLOT_W
    }

    fn y_clipped(&self, v: f64) -> (f64, Clip) {
        let (lo, hi) = (self.dec_min as f64, self.dec_max as f64);
        let (e, clip) = if v > 10f64.powf(hi) {
            (hi, Clip::Above)
        } else if v <= 0.0 || v.log10() < lo {
            (lo, Clip::Below)
        } else {
            (v.log10(), Clip::Inside)
        };
        (TOP + (hi - e) / (hi - lo) * PLOT_H, clip)
    }

    pub fn y(&self, v: f64) -> f64 {
        self.y_clipped(v).0
    }
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

fn clip_marker(svg: &mut String, x: f64, y: f64, clip: Clip, color: &str) {
    let path = match clip {
        Clip::Above => format!("M{:.2},{:.2} l-5,8 h10 z", x, y - 2.0),
        Clip::Below => format!("M{:.2},{:.2} l-5,-8 h10 z", x, y + 2.0),
        Clip::Inside => return,
    };
    let _ = writeln!(svg, r#"<path class="clip" d="{path}" fill="{color}"/>"#);
}

/// A polyline broken at NaN values, plus clip markers.
fn series_line(svg: &mut String, axes: &Axes, points: &[(f64, f64)], color: &str, extra: &str) {
    let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for &(n, v) in points {
        if v.is_nan() {
            segments.push(Vec::new());
            continue;
        }
        let (y, clip) = axes.y_clipped(v);
        let x = axes.x(n);
        segments.last_mut().expect("nonempty").push((x, y));
        clip_marker(svg, x, y, clip, color);
    }
    for seg in segments.iter().filter(|s| s.len() > 1) {
        let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{extra} points="{}"/>"#,
            pts.join(" ")
        );
    }
}

fn tooltip(label: &str, r: &SweepRecord, what: &str, v: f64) -> String {
    escape(&format!("{label}, n={}: {what} {}", r.n, format_float(v)))
}

/// Renders the chart as an SVG document.
pub fn render_svg_string(records: &[SweepRecord]) -> Result<String, CliError> {
    if records.is_empty() {
        return Err(CliError::usage("cannot draw a chart from zero records"));
    }
    let axes = Axes::from_records(records);
    let first = &records[0];
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let title = format!(
        "Scenario {}: MSE versus n (p={}, M={}, {} mode)",
        first.scenario.as_str().to_uppercase(),
        first.p,
        first.replicates,
        first.mode
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(&title));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + PLOT_W / 2.0,
        escape(&title)
    );

    // Grid, ticks and axes.
    for d in axes.dec_min..=axes.dec_max {
        let y = TOP + (axes.dec_max - d) as f64 / (axes.dec_max - axes.dec_min) as f64 * PLOT_H;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + PLOT_W
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">10<tspan dy="-5" font-size="9">{d}</tspan></text>"#,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let span = axes.n_max - axes.n_min;
    let step = [1.0, 2.0, 5.0, 10.0, 20.0, 25.0, 50.0, 100.0, 200.0, 500.0, 1000.0]
        .into_iter()
        .find(|s| span / s <= 10.0)
        .unwrap_or((span / 10.0).ceil());
    let mut tick = (axes.n_min / step).ceil() * step;
    while tick <= axes.n_max + 1e-9 {
        let x = axes.x(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000"/>"##,
            TOP + PLOT_H,
            TOP + PLOT_H + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{tick}</text>"#,
            TOP + PLOT_H + 18.0
        );
        tick += step;
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#000000"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">number of samples n</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="22" y="{:.1}" text-anchor="middle" transform="rotate(-90 22 {:.1})">MSE (log scale)</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0
    );

    let mut legend: Vec<(String, String, bool)> = Vec::new();

    // Partial-model series, one per p_S.
    let mut orders: Vec<usize> = records.iter().filter(|r| !r.is_baseline()).map(|r| r.p_s).collect();
    orders.sort_unstable();
    orders.dedup();
    let mut any_analytic = false;
    for (k, &p_s) in orders.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut rows: Vec<&SweepRecord> = records.iter().filter(|r| !r.is_baseline() && r.p_s == p_s).collect();
        rows.sort_by_key(|r| r.n);
        let label = format!("p_S = {p_s}");
        let _ = writeln!(svg, r#"<g class="series" data-p-s="{p_s}">"#);
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.empirical_mse)).collect();
        series_line(&mut svg, &axes, &points, color, "");
        for r in &rows {
            if r.empirical_mse.is_nan() {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<circle class="empirical" cx="{:.2}" cy="{:.2}" r="2.2" fill="{color}"><title>{}</title></circle>"#,
                axes.x(r.n as f64),
                axes.y(r.empirical_mse),
                tooltip(&label, r, "empirical", r.empirical_mse)
            );
            if let Some(a) = r.analytic_mse.filter(|a| !a.is_nan()) {
                any_analytic = true;
                let (y, clip) = axes.y_clipped(a);
                let _ = writeln!(
                    svg,
                    r#"<circle class="analytic" cx="{:.2}" cy="{y:.2}" r="4" fill="none" stroke="{color}" stroke-width="1.2"><title>{}</title></circle>"#,
                    axes.x(r.n as f64),
                    tooltip(&label, r, "analytic", a)
                );
                clip_marker(&mut svg, axes.x(r.n as f64), y, clip, color);
            }
        }
        let _ = writeln!(svg, "</g>");
        legend.push((label, color.to_string(), false));
    }

    // Full-LMMSE baseline.
    let mut base: Vec<&SweepRecord> = records.iter().filter(|r| r.is_baseline()).collect();
    base.sort_by_key(|r| r.n);
    if !base.is_empty() {
        let _ = writeln!(svg, r#"<g class="baseline">"#);
        let points: Vec<(f64, f64)> = base.iter().map(|r| (r.n as f64, r.empirical_mse)).collect();
        series_line(&mut svg, &axes, &points, "#000000", r#" stroke-dasharray="6,4""#);
        let every = base.len().div_ceil(12).max(1);
        for (i, r) in base.iter().enumerate() {
            if r.empirical_mse.is_nan() {
                continue;
            }
            let radius = if i % every == 0 { 3.0 } else { 1.2 };
            let _ = writeln!(
                svg,
                r##"<rect class="baseline-point" x="{:.2}" y="{:.2}" width="{}" height="{}" fill="#000000"><title>{}</title></rect>"##,
                axes.x(r.n as f64) - radius,
                axes.y(r.empirical_mse) - radius,
                2.0 * radius,
                2.0 * radius,
                tooltip("full LMMSE", r, "empirical", r.empirical_mse)
            );
        }
        let _ = writeln!(svg, "</g>");
        legend.push(("full LMMSE (baseline)".into(), "#000000".into(), true));
    }

    // Legend.
    let lx = LEFT + PLOT_W + 20.0;
    let mut ly = TOP + 10.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (label, color, dashed) in &legend {
        let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 26.0
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 32.0, ly + 4.0, escape(label));
        ly += 20.0;
    }
    if any_analytic {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.1}" cy="{ly:.1}" r="4" fill="none" stroke="#000000"/>"##,
            lx + 13.0
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">analytic</text>"#, lx + 32.0, ly + 4.0);
        ly += 20.0;
    }
    let _ = writeln!(svg, r##"<path d="M{:.1},{:.1} l-5,8 h10 z" fill="#000000"/>"##, lx + 13.0, ly - 6.0);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">clipped at 10^4</text>"#, lx + 32.0, ly + 4.0);
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn render_svg(records: &[SweepRecord], path: &Path) -> Result<(), CliError> {
    let svg = render_svg_string(records)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}
