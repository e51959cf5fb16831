//! Loop performance measures computed from a sampled pressure trajectory.

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::plant::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Rise,
    Fall,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub iae: f64,
    pub ise: f64,
    pub itae: f64,
    pub sse: f64,
    pub rise_time: Option<f64>,
    pub fall_time: Option<f64>,
    pub settling_time: Option<f64>,
    pub over_under_pct: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicMetrics {
    pub sse: f64,
    pub rise_time: Option<f64>,
    pub fall_time: Option<f64>,
    pub settling_time: Option<f64>,
    pub over_under_pct: f64,
    pub direction: Direction,
}

pub fn error_metrics(values: &[f64], setpoint: f64) -> Result<(f64, f64, f64), MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = values.len() as f64;
    let (mut sq, mut abs) = (0.0, 0.0);
    for &y in values {
        let e = setpoint - y;
        sq += e * e;
        abs += e.abs();
    }
    let mse = sq / n;
    Ok((mse, mse.sqrt(), abs / n))
}

/// Rectangle-rule IAE, ISE and ITAE with `t = i * dt`.
pub fn integral_metrics(values: &[f64], setpoint: f64, dt: f64) -> Result<(f64, f64, f64), MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    if !(dt > 0.0) {
        return Err(MetricsError::NonUniform);
    }
    let (mut iae, mut ise, mut itae) = (0.0, 0.0, 0.0);
    for (i, &y) in values.iter().enumerate() {
        let e = (setpoint - y).abs();
        iae += e;
        ise += e * e;
        itae += i as f64 * dt * e;
    }
    Ok((iae * dt, ise * dt, itae * dt))
}

fn check_band(band_pct: f64) -> Result<(), MetricsError> {
    if band_pct == 2.0 || band_pct == 5.0 {
        Ok(())
    } else {
        Err(MetricsError::Band(band_pct))
    }
}

/// First instant the signal reaches `level` moving in `dir`, linearly
/// interpolated between samples.
fn crossing(values: &[f64], dt: f64, level: f64, rising: bool) -> Option<f64> {
    let reached = |y: f64| if rising { y >= level } else { y <= level };
    let k = values.iter().position(|&y| reached(y))?;
    if k == 0 {
        return Some(0.0);
    }
    let (y0, y1) = (values[k - 1], values[k]);
    let frac = if y1 != y0 { ((level - y0) / (y1 - y0)).clamp(0.0, 1.0) } else { 1.0 };
    Some((k as f64 - 1.0 + frac) * dt)
}

/// Steady-state error, 10-90% rise or fall time, settling time and
/// over/undershoot. `initial` is the pre-run pressure that fixes the
/// direction of travel.
pub fn dynamic_metrics(
    values: &[f64],
    setpoint: f64,
    dt: f64,
    band_pct: f64,
    initial: f64,
) -> Result<DynamicMetrics, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    if setpoint == 0.0 {
        return Err(MetricsError::ZeroSetpoint);
    }
    check_band(band_pct)?;

    let n = values.len();
    let tail = (n / 10).max(1);
    let sse = values[n - tail..].iter().map(|y| (setpoint - y).abs()).sum::<f64>() / tail as f64;

    let direction = if initial < setpoint {
        Direction::Rise
    } else if initial > setpoint {
        Direction::Fall
    } else {
        Direction::None
    };

    let span = setpoint - initial;
    let (lo, hi) = (initial + 0.1 * span, initial + 0.9 * span);
    let transition = |rising: bool| match (crossing(values, dt, lo, rising), crossing(values, dt, hi, rising)) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    let (rise_time, fall_time) = match direction {
        Direction::Rise => (transition(true), None),
        Direction::Fall => (None, transition(false)),
        Direction::None => (None, None),
    };

    let band = band_pct * setpoint.abs() / 100.0;
    let outside = |y: &f64| (y - setpoint).abs() > band;
    let settling_time = match values.iter().rposition(outside) {
        None => Some(0.0),
        Some(k) if k + 1 == n => None,
        Some(k) => Some((k + 1) as f64 * dt),
    };

    let over_under_pct = match direction {
        Direction::Rise => {
            let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ((peak - setpoint) / setpoint * 100.0).max(0.0)
        }
        Direction::Fall => {
            let low = values.iter().copied().fold(f64::INFINITY, f64::min);
            ((setpoint - low) / setpoint * 100.0).max(0.0)
        }
        Direction::None => 0.0,
    };

    Ok(DynamicMetrics { sse, rise_time, fall_time, settling_time, over_under_pct, direction })
}

pub fn evaluate(values: &[f64], setpoint: f64, dt: f64, band_pct: f64, initial: f64) -> Result<MetricsReport, MetricsError> {
    let (mse, rmse, mae) = error_metrics(values, setpoint)?;
    let (iae, ise, itae) = integral_metrics(values, setpoint, dt)?;
    let d = dynamic_metrics(values, setpoint, dt, band_pct, initial)?;
    Ok(MetricsReport {
        mse,
        rmse,
        mae,
        iae,
        ise,
        itae,
        sse: d.sse,
        rise_time: d.rise_time,
        fall_time: d.fall_time,
        settling_time: d.settling_time,
        over_under_pct: d.over_under_pct,
        direction: d.direction,
    })
}

pub fn evaluate_series(series: &Series, band_pct: f64) -> Result<MetricsReport, MetricsError> {
    evaluate(&series.pressure, series.setpoint, series.dt, band_pct, series.initial_pressure)
}
