//! Plain-text SVG line charts of sweep aggregates.

use std::fmt::Write as _;

use crate::error::{ExperimentError, Result};
use crate::sweep::Aggregate;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const MARKERS: [&str; 5] = ["circle", "square", "diamond", "triangle", "cross"];

#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl PlotStyle {
    pub fn new(title: &str, x_label: &str) -> Self {
        PlotStyle {
            title: title.into(),
            x_label: x_label.into(),
            y_label: "average sum harvested power (µW)".into(),
            width: 720.0,
            height: 460.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick step of 1, 2 or 5 times a power of ten giving about five ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|f| f * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn marker(shape: &str, x: f64, y: f64, color: &str, attrs: &str) -> String {
    match shape {
        "square" => format!(r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="{color}" {attrs}/>"#, x - 3.5, y - 3.5),
        "diamond" => format!(
            r#"<polygon points="{x:.2},{:.2} {:.2},{y:.2} {x:.2},{:.2} {:.2},{y:.2}" fill="{color}" {attrs}/>"#,
            y - 4.5,
            x + 4.5,
            y + 4.5,
            x - 4.5
        ),
        "triangle" => format!(
            r#"<polygon points="{x:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}" {attrs}/>"#,
            y - 4.5,
            x + 4.5,
            y + 3.5,
            x - 4.5,
            y + 3.5
        ),
        "cross" => format!(
            r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="2" {attrs}/>"#,
            x - 4.0,
            y - 4.0,
            x + 4.0,
            y + 4.0,
            x - 4.0,
            y + 4.0,
            x + 4.0,
            y - 4.0
        ),
        _ => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}" {attrs}/>"#),
    }
}

/// One series per scheme: mean sum harvested power against the sweep value
/// with standard-error bars. Points without a feasible drop are skipped; a
/// series with a single point gets a marker and no line.
pub fn render_plot(aggregates: &[Aggregate], style: &PlotStyle) -> Result<String> {
    let mut schemes: Vec<&str> = Vec::new();
    for a in aggregates {
        if !schemes.contains(&a.scheme.as_str()) {
            schemes.push(&a.scheme);
        }
    }
    let finite: Vec<&Aggregate> = aggregates.iter().filter(|a| a.mean_sum_phi_uw.is_finite()).collect();
    if finite.is_empty() {
        return Err(ExperimentError::EmptyPlot(if aggregates.is_empty() {
            "no aggregates".into()
        } else {
            "no sweep point has a feasible drop".into()
        }));
    }

    let (mut x_lo, mut x_hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            let x = a.sweep_value as f64;
            (lo.min(x), hi.max(x))
        });
    if x_hi - x_lo < 1e-9 {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_top = finite
        .iter()
        .map(|a| a.mean_sum_phi_uw + a.stderr_sum_phi_uw.max(0.0))
        .fold(0.0, f64::max);
    let y_step = tick_step(if y_top > 0.0 { y_top * 1.05 } else { 1.0 });
    let y_hi = ((y_top * 1.05) / y_step).ceil().max(1.0) * y_step;
    let x_step = tick_step(x_hi - x_lo).max(1.0);

    let (left, right, top, bottom) = (80.0, 170.0, 50.0, 60.0);
    let pw = style.width - left - right;
    let ph = style.height - top - bottom;
    let sx = |x: f64| left + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| top + ph - y / y_hi * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
    );

    let mut y = 0.0;
    while y <= y_hi + y_step * 1e-9 {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e0e0e0"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"##,
            left + pw,
            left - 6.0,
            py + 4.0,
            tick_label(y, y_step)
        );
        y += y_step;
    }
    let mut x = (x_lo / x_step).ceil() * x_step;
    while x <= x_hi + 1e-9 {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            top + ph,
            top + ph + 5.0,
            top + ph + 20.0,
            tick_label(x, x_step)
        );
        x += x_step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        style.height - 15.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        top + ph / 2.0,
        escape(&style.y_label)
    );

    for (i, scheme) in schemes.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let shape = MARKERS[i % MARKERS.len()];
        let mut pts: Vec<&&Aggregate> = finite.iter().filter(|a| a.scheme == *scheme).collect();
        pts.sort_by_key(|a| a.sweep_value);
        let _ = writeln!(s, r#"<g class="series" data-scheme="{}">"#, escape(scheme));
        if pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|a| format!("{:.2},{:.2}", sx(a.sweep_value as f64), sy(a.mean_sum_phi_uw)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for a in &pts {
            let (px, py) = (sx(a.sweep_value as f64), sy(a.mean_sum_phi_uw));
            if a.stderr_sum_phi_uw > 0.0 {
                let (y0, y1) = (
                    sy((a.mean_sum_phi_uw - a.stderr_sum_phi_uw).max(0.0)),
                    sy(a.mean_sum_phi_uw + a.stderr_sum_phi_uw),
                );
                let _ = writeln!(
                    s,
                    r#"<path d="M{px:.2},{y0:.2}V{y1:.2}M{:.2},{y0:.2}h8M{:.2},{y1:.2}h8" stroke="{color}"/>"#,
                    px - 4.0,
                    px - 4.0
                );
            }
            let attrs = format!(
                r#"data-x="{}" data-mean-uw="{:.6e}" data-stderr-uw="{:.6e}""#,
                a.sweep_value, a.mean_sum_phi_uw, a.stderr_sum_phi_uw
            );
            let _ = writeln!(s, "{}", marker(shape, px, py, color, &attrs));
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = left + pw + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"/>{}<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 24.0,
            marker(shape, lx + 12.0, ly, color, ""),
            lx + 30.0,
            ly + 4.0,
            escape(scheme)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
