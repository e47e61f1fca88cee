//! Deterministic SVG charts for sweep results.

use std::fmt::Write as _;

use crate::analysis::SweepSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str, y_max: u128) {
    let (x0, y0, x1) = (LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT);
    let _ = writeln!(
        out,
        r#"<path class="axis" d="M{x0} {TOP} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{y_max}</text>"#,
        x0 - 6.0,
        TOP + 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">0</text>"#,
        x0 - 6.0,
        y0 + 4.0
    );
}

fn scale(value: u128, max: u128) -> f64 {
    if max == 0 {
        0.0
    } else {
        (value as f64 / max as f64) * (HEIGHT - TOP - BOTTOM)
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Stacked bars of per-level data movement, one bar per swept value and
/// one `segment` rect per level (zero-height segments included).
pub fn stacked_bar(series: &SweepSeries) -> String {
    let mut out = String::new();
    let symbol = series.spec.parameter.symbol();
    header(
        &mut out,
        &format!("{} data movement per level vs {symbol}", series.accelerator),
    );
    let max = series
        .points
        .iter()
        .map(|p| p.breakdown.total_dm_bits)
        .max()
        .unwrap_or(0);
    axes(&mut out, symbol, "data movement (bits)", max);

    let n = series.points.len().max(1) as f64;
    let slot = (WIDTH - LEFT - RIGHT) / n;
    let bar = (slot * 0.7).max(1.0);
    let base = HEIGHT - BOTTOM;
    for (i, point) in series.points.iter().enumerate() {
        let x = round2(LEFT + slot * i as f64 + (slot - bar) / 2.0);
        let _ = writeln!(out, r#"<g class="bar" data-value="{}">"#, point.value);
        let mut y = base;
        for (j, level) in point.breakdown.levels.iter().enumerate() {
            let h = scale(level.data_movement_bits, max);
            y -= h;
            let _ = writeln!(
                out,
                r#"<rect class="segment" data-level="{}" x="{x}" y="{}" width="{}" height="{}" fill="{}"><title>{}: {} bits</title></rect>"#,
                escape(&level.label),
                round2(y),
                round2(bar),
                round2(h),
                PALETTE[j % PALETTE.len()],
                escape(&level.label),
                level.data_movement_bits
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            round2(x + bar / 2.0),
            base + 16.0,
            point.value
        );
        out.push_str("</g>\n");
    }

    if let Some(first) = series.points.first() {
        out.push_str("<g class=\"legend\">\n");
        for (j, level) in first.breakdown.levels.iter().enumerate() {
            let y = TOP + 18.0 * j as f64;
            let x = WIDTH - RIGHT + 20.0;
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                PALETTE[j % PALETTE.len()],
                x + 18.0,
                y + 10.0,
                escape(&level.label)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart of total iterations against the swept value. Points are
/// spaced evenly in sweep order.
pub fn line(series: &SweepSeries) -> String {
    let mut out = String::new();
    let symbol = series.spec.parameter.symbol();
    header(
        &mut out,
        &format!("{} total iterations vs {symbol}", series.accelerator),
    );
    let max = series
        .points
        .iter()
        .map(|p| p.breakdown.total_iterations)
        .max()
        .unwrap_or(0);
    axes(&mut out, symbol, "total iterations", max);

    let span = WIDTH - LEFT - RIGHT;
    let n = series.points.len();
    let x_at = |i: usize| {
        if n <= 1 {
            LEFT + span / 2.0
        } else {
            LEFT + span * i as f64 / (n - 1) as f64
        }
    };
    let coords: Vec<(f64, f64)> = series
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            (
                round2(x_at(i)),
                round2(HEIGHT - BOTTOM - scale(p.breakdown.total_iterations, max)),
            )
        })
        .collect();
    let pts: Vec<String> = coords.iter().map(|(x, y)| format!("{x},{y}")).collect();
    let _ = writeln!(
        out,
        r##"<polyline class="series" points="{}" fill="none" stroke="#4e79a7" stroke-width="2"/>"##,
        pts.join(" ")
    );
    for ((x, y), p) in coords.iter().zip(&series.points) {
        let _ = writeln!(
            out,
            r##"<circle class="point" cx="{x}" cy="{y}" r="3" fill="#4e79a7"><title>{symbol}={}: {}</title></circle>"##,
            p.value, p.breakdown.total_iterations
        );
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 16.0,
            p.value
        );
    }
    out.push_str("</svg>\n");
    out
}
