//! Self-contained SVG line plots and binary heat maps.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 140.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
/// Heat maps are decimated to at most this many rows.
const MAX_HEATMAP_ROWS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Axes<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_scale: Scale,
    pub y_scale: Scale,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn transform(v: f64, scale: Scale) -> Option<f64> {
    match scale {
        Scale::Linear if v.is_finite() => Some(v),
        Scale::Log if v > 0.0 && v.is_finite() => Some(v.log10()),
        _ => None,
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log => format!("1e{}", v.round()),
        Scale::Linear => format!("{:.3}", v),
    }
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(
        out,
        r#"<rect width="100%" height="100%" fill="white"/><text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn frame(out: &mut String, axes: &Axes, x: (f64, f64), y: (f64, f64)) {
    let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
    let _ = write!(
        out,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = MARGIN_L + f * pw;
        let py = MARGIN_T + ph - f * ph;
        let _ = write!(
            out,
            r#"<text x="{px}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN_T + ph + 16.0,
            tick_label(x.0 + f * (x.1 - x.0), axes.x_scale),
            MARGIN_L - 6.0,
            py + 4.0,
            tick_label(y.0 + f * (y.1 - y.0), axes.y_scale),
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0,
        escape(axes.x_label),
        MARGIN_T + ph / 2.0,
        escape(axes.y_label)
    );
}

/// Polylines for each series; points that cannot be shown on a log axis
/// are dropped.
pub fn line_plot(axes: &Axes, series: &[Series]) -> String {
    let mapped: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((transform(x, axes.x_scale)?, transform(y, axes.y_scale)?)))
                .collect()
        })
        .collect();
    let x = range(mapped.iter().flatten().map(|p| p.0));
    let y = range(mapped.iter().flatten().map(|p| p.1));
    let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);

    let mut out = String::new();
    header(&mut out, axes.title);
    frame(&mut out, axes, x, y);
    for (k, (s, pts)) in series.iter().zip(&mapped).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        for (px, py) in pts {
            let sx = MARGIN_L + (px - x.0) / (x.1 - x.0) * pw;
            let sy = MARGIN_T + ph - (py - y.0) / (y.1 - y.0) * ph;
            let _ = write!(path, "{sx:.2},{sy:.2} ");
        }
        let _ = write!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.trim_end()
        );
        let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - MARGIN_R + 10.0;
        let _ = write!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Cells on the horizontal axis, time downwards; filled where the value is 1.
pub fn heatmap(title: &str, times: &[f64], n_cells: usize, rows: &[&[u8]]) -> String {
    let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
    let step = rows.len().div_ceil(MAX_HEATMAP_ROWS).max(1);
    let shown: Vec<usize> = (0..rows.len()).step_by(step).collect();
    let cw = pw / n_cells.max(1) as f64;
    let rh = ph / shown.len().max(1) as f64;
    let axes = Axes {
        title,
        x_label: "cell",
        y_label: "t",
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
    };
    let t0 = times.first().copied().unwrap_or(0.0);
    let t1 = times.last().copied().unwrap_or(1.0);

    let mut out = String::new();
    header(&mut out, title);
    frame(&mut out, &axes, (1.0, n_cells as f64), (t1, t0));
    for (k, &s) in shown.iter().enumerate() {
        // runs of ones become one rectangle
        let row = rows[s];
        let mut c = 0;
        while c < row.len() {
            if row[c] == 0 {
                c += 1;
                continue;
            }
            let start = c;
            while c < row.len() && row[c] == 1 {
                c += 1;
            }
            let _ = write!(
                out,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d62728"/>"##,
                MARGIN_L + start as f64 * cw,
                MARGIN_T + k as f64 * rh,
                (c - start) as f64 * cw,
                rh.max(0.5)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
