//! Minimal static SVG line charts for pressure and valve trajectories.

use std::fmt::Write;

use crate::plant::Series;

const W: f64 = 800.0;
const H: f64 = 420.0;
const ML: f64 = 64.0;
const MR: f64 = 170.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

pub struct Line<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub dashed: bool,
    pub y: &'a [f64],
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= target as f64).unwrap_or(mag * 10.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, x: &[f64], lines: &[Line], y_range: Option<(f64, f64)>) -> String {
    let (x0, x1) = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0).max(1e-9));
    let (y0, y1) = y_range.unwrap_or_else(|| {
        let all = lines.iter().flat_map(|l| l.y.iter().copied());
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if lo.is_finite() {
            let pad = ((hi - lo) * 0.05).max(0.05);
            (lo - pad, hi + pad)
        } else {
            (0.0, 1.0)
        }
    });
    let pw = W - ML - MR;
    let ph = H - MT - MB;
    let sx = |v: f64| ML + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| MT + (1.0 - (v - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, ML + pw / 2.0, escape(title));
    for t in nice_ticks(x0, x1, 10) {
        let px = sx(t);
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{MT}" x2="{px:.2}" y2="{:.2}" stroke="#e4e4e4"/>"##, MT + ph);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MT + ph + 16.0, label(t));
    }
    for t in nice_ticks(y0, y1, 8) {
        let py = sy(t);
        let _ = writeln!(s, r##"<line x1="{ML}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e4e4e4"/>"##, ML + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, ML - 6.0, py + 4.0, label(t));
    }
    let _ = writeln!(s, r#"<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, ML + pw / 2.0, H - 12.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MT + ph / 2.0,
        MT + ph / 2.0,
        escape(y_label)
    );
    for (k, l) in lines.iter().enumerate() {
        let pts: Vec<String> = x.iter().zip(l.y).map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b.clamp(y0, y1)))).collect();
        let dash = if l.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.6"{dash} points="{}"/>"#, l.color, pts.join(" "));
        let ly = MT + 14.0 + k as f64 * 18.0;
        let lx = ML + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/>"#, lx + 22.0, l.color);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, escape(l.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn pressure_svg(series: &Series, title: &str) -> String {
    let sp = vec![series.setpoint; series.len()];
    line_chart(
        title,
        "time, s",
        "pressure, bar",
        &series.t,
        &[
            Line { label: "pressure", color: "#1f77b4", dashed: false, y: &series.pressure },
            Line { label: "setpoint", color: "#d62728", dashed: true, y: &sp },
        ],
        None,
    )
}

pub fn valves_svg(series: &Series, title: &str) -> String {
    line_chart(
        title,
        "time, s",
        "valve position, %",
        &series.t,
        &[
            Line { label: "fuel command", color: "#2ca02c", dashed: true, y: &series.fuel_cmd },
            Line { label: "fuel effective", color: "#2ca02c", dashed: false, y: &series.fuel_eff },
            Line { label: "outlet command", color: "#ff7f0e", dashed: true, y: &series.outlet_cmd },
            Line { label: "outlet effective", color: "#ff7f0e", dashed: false, y: &series.outlet_eff },
        ],
        Some((0.0, 100.0)),
    )
}
