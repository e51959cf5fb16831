//! Plain-text exports. Every number is written with six decimals so that
//! reruns with the same seed produce identical files.

use std::fmt::Write;

use crate::metrics::MetricsReport;
use crate::plant::Series;
use crate::scenario::{Aggregate, Ranking};
use crate::sysid::{GridResult, SignalDataset};

pub const SERIES_HEADER: &str = "t_s,setpoint_bar,pressure_bar,fuel_cmd_pct,outlet_cmd_pct,fuel_eff_pct,outlet_eff_pct";
pub const DATASET_HEADER: &str = "t_s,u,y";
pub const GRID_HEADER: &str = "na,nb,nk,misfit_pct";
pub const METRICS_HEADER: &str = "ipe_bar,mse,rmse,mae,iae,ise,itae,sse,rise_s,fall_s,settle_s,over_under_pct";
pub const SUMMARY_HEADER: &str =
    "method,mse,rmse,mae,iae,ise,itae,sse,settle_s,max_over_under_pct,unsettled_ipes,never_settles";

pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    // avoid "-0.000000" for tiny negatives
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt6(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

pub fn series_csv(s: &Series) -> String {
    let mut out = String::with_capacity(64 * (s.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for i in 0..s.len() {
        let row = [s.t[i], s.setpoint, s.pressure[i], s.fuel_cmd[i], s.outlet_cmd[i], s.fuel_eff[i], s.outlet_eff[i]];
        let cells: Vec<String> = row.iter().map(|&v| fmt6(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn metrics_row(ipe: f64, m: &MetricsReport) -> String {
    [
        fmt6(ipe),
        fmt6(m.mse),
        fmt6(m.rmse),
        fmt6(m.mae),
        fmt6(m.iae),
        fmt6(m.ise),
        fmt6(m.itae),
        fmt6(m.sse),
        opt6(m.rise_time),
        opt6(m.fall_time),
        opt6(m.settling_time),
        fmt6(m.over_under_pct),
    ]
    .join(",")
}

pub fn metrics_csv(rows: &[(f64, MetricsReport)]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for (ipe, m) in rows {
        out.push_str(&metrics_row(*ipe, m));
        out.push('\n');
    }
    out
}

pub fn aggregate_csv(aggs: &[&Aggregate]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for a in aggs {
        let _ = writeln!(
            out,
            "{}",
            [
                fmt6(a.ipe),
                fmt6(a.mse),
                fmt6(a.rmse),
                fmt6(a.mae),
                fmt6(a.iae),
                fmt6(a.ise),
                fmt6(a.itae),
                fmt6(a.sse),
                opt6(a.rise_time),
                opt6(a.fall_time),
                opt6(a.settling_time),
                fmt6(a.over_under_pct),
            ]
            .join(",")
        );
    }
    out
}

pub fn summary_csv(r: &Ranking) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for s in &r.methods {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.method,
            fmt6(s.mse),
            fmt6(s.rmse),
            fmt6(s.mae),
            fmt6(s.iae),
            fmt6(s.ise),
            fmt6(s.itae),
            fmt6(s.sse),
            opt6(s.settling_time),
            fmt6(s.max_over_under_pct),
            s.unsettled_ipes,
            s.never_settles
        );
    }
    for (metric, m) in &r.best {
        let _ = writeln!(out, "# best {metric}: {m}");
    }
    out
}

pub fn dataset_csv(d: &SignalDataset) -> String {
    let mut out = format!("{DATASET_HEADER}\n");
    for i in 0..d.len() {
        let _ = writeln!(out, "{},{},{}", fmt6(d.t[i]), fmt6(d.u[i]), fmt6(d.y[i]));
    }
    out
}

pub fn parse_dataset_csv(text: &str) -> Result<SignalDataset, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == DATASET_HEADER => {}
        other => return Err(format!("expected header `{DATASET_HEADER}`, found {other:?}")),
    }
    let (mut t, mut u, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let f: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("row {}: {e}", n + 1))?;
        if f.len() != 3 {
            return Err(format!("row {}: expected 3 fields", n + 1));
        }
        t.push(f[0]);
        u.push(f[1]);
        y.push(f[2]);
    }
    if t.len() < 2 {
        return Err("dataset needs at least two rows".into());
    }
    let dt = t[1] - t[0];
    if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs().max(1.0)) || dt <= 0.0 {
        return Err("time column must increase with a constant step".into());
    }
    SignalDataset::new(u, y, dt).map_err(|e| e.to_string())
}

pub fn grid_csv(g: &GridResult) -> String {
    let mut out = format!("{GRID_HEADER}\n");
    for r in &g.rows {
        let _ = writeln!(out, "{},{},{},{}", r.order.na, r.order.nb, r.order.nk, fmt6(r.misfit_pct));
    }
    out
}
