//! Minimal deterministic SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Mark the 10 % / 90 % levels of a step to this reference.
    pub step_reference: Option<f64>,
}

/// 10 % and 90 % crossing times of the first rising edge toward `p_ref`.
pub fn step_annotations(points: &[(f64, f64)], p_ref: f64) -> Option<(f64, f64)> {
    let cross = |level: f64| {
        points.windows(2).find_map(|w| {
            let ((t0, y0), (t1, y1)) = (w[0], w[1]);
            (y0 < level && y1 >= level).then(|| t0 + (level - y0) / (y1 - y0) * (t1 - t0))
        })
    };
    let t10 = cross(0.1 * p_ref)?;
    let t90 = cross(0.9 * p_ref)?;
    Some((t10, t90))
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render series as an SVG document.
pub fn emit_plot(series: &[Series], style: &PlotStyle) -> Result<String, String> {
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if all.is_empty() {
        return Err("nothing to plot: all series are empty".into());
    }
    if all.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err("series contain non-finite values".into());
    }
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
    );
    if let Some(p) = style.step_reference {
        y0 = y0.min(0.0);
        y1 = y1.max(p);
    }
    if x1 - x0 <= 0.0 {
        let pad = x0.abs().max(1.0) * 0.5;
        (x0, x1) = (x0 - pad, x1 + pad);
    }
    if y1 - y0 <= 0.0 {
        let pad = y0.abs().max(1.0) * 0.5;
        (y0, y1) = (y0 - pad, y1 + pad);
    } else {
        let pad = 0.05 * (y1 - y0);
        (y0, y1) = (y0 - pad, y1 + pad);
    }

    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_T + ph + 18.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_L - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        escape(&style.y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        match s.points.len() {
            0 => {}
            1 => {
                let (x, y) = s.points[0];
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
            _ => {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
        }
        let ly = MARGIN_T + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#,
            MARGIN_L + pw - 8.0,
            escape(&s.name)
        );
    }

    if let Some(p_ref) = style.step_reference {
        if let Some(first) = series.first() {
            for level in [0.1 * p_ref, 0.9 * p_ref] {
                let y = sy(level);
                let _ = writeln!(
                    out,
                    r##"<line class="threshold" x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#777" stroke-dasharray="4 3"/>"##,
                    MARGIN_L + pw
                );
            }
            if let Some((t10, t90)) = step_annotations(&first.points, p_ref) {
                for (t, label) in [(t10, "10%"), (t90, "90%")] {
                    let x = sx(t);
                    let _ = writeln!(
                        out,
                        r##"<line class="crossing" data-t="{}" x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="#777" stroke-dasharray="2 2"/>"##,
                        spindle_core::io::fmt_num(t),
                        MARGIN_T + ph
                    );
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
                        x + 3.0,
                        MARGIN_T + 12.0
                    );
                }
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}">rise {} s</text>"#,
                    MARGIN_L + 8.0,
                    MARGIN_T + ph - 8.0,
                    fmt_tick(t90 - t10)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
