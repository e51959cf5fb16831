use serde::{Deserialize, Serialize};

use crate::error::PlantError;

/// Fuel valve opening at which the default plant is in equilibrium with the
/// outlet valve at [`VALVE_BALANCE_OUTLET_PCT`].
pub const VALVE_BALANCE_FUEL_PCT: f64 = 7.8;
pub const VALVE_BALANCE_OUTLET_PCT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantConfig {
    /// Pressure rate in bar/s per unit of inflow (base flow plus full valve).
    pub fuel_gain: f64,
    /// Pressure rate in bar/s per unit of outflow.
    pub outlet_gain: f64,
    /// Base inflow that bypasses the fuel valve, as a fraction of full valve flow.
    pub fuel_flow: f64,
    /// Base outflow that bypasses the outlet valve.
    pub base_outflow: f64,
    pub noise_std: f64,
    pub dt: f64,
    pub duration: f64,
    pub initial_pressure: f64,
    pub actuator_dynamics: bool,
    pub delay: f64,
}

impl Default for PlantConfig {
    fn default() -> Self {
        let (gain, base_outflow) = (1.5, 0.1);
        Self {
            fuel_gain: gain,
            outlet_gain: gain,
            fuel_flow: base_outflow + (VALVE_BALANCE_OUTLET_PCT - VALVE_BALANCE_FUEL_PCT) / 100.0,
            base_outflow,
            noise_std: 0.005,
            dt: 0.1,
            duration: 25.0,
            initial_pressure: 5.0,
            actuator_dynamics: false,
            delay: 0.5,
        }
    }
}

impl PlantConfig {
    pub fn validate(&self) -> Result<(), PlantError> {
        let bad = |field: &'static str, reason: String| Err(PlantError::Parameter { field, reason });
        let finite = [
            ("fuel_gain", self.fuel_gain),
            ("outlet_gain", self.outlet_gain),
            ("fuel_flow", self.fuel_flow),
            ("base_outflow", self.base_outflow),
            ("noise_std", self.noise_std),
            ("dt", self.dt),
            ("duration", self.duration),
            ("initial_pressure", self.initial_pressure),
            ("delay", self.delay),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return bad(field, format!("{v} is not a finite number"));
            }
            if v < 0.0 {
                return bad(field, format!("{v} must be non-negative"));
            }
        }
        if self.dt <= 0.0 {
            return bad("dt", "must be positive".into());
        }
        if self.duration < self.dt {
            return bad("duration", format!("{} is shorter than one step of {}", self.duration, self.dt));
        }
        if self.duration / self.dt > 1e7 {
            return bad("duration", "more than 10^7 steps".into());
        }
        if self.initial_pressure > 10.0 {
            return bad("initial_pressure", format!("{} is outside [0, 10] bar", self.initial_pressure));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().max(1.0) as usize
    }

    /// Net pressure rate for the given effective valve openings.
    pub fn rate(&self, fuel_pct: f64, outlet_pct: f64) -> f64 {
        self.fuel_gain * (self.fuel_flow + fuel_pct / 100.0)
            - self.outlet_gain * (self.base_outflow + outlet_pct / 100.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantState {
    pub t: f64,
    pub pressure_true: f64,
    pub pressure_measured: f64,
    pub fuel_effective_pct: f64,
    pub outlet_effective_pct: f64,
}

impl PlantState {
    pub fn initial(cfg: &PlantConfig) -> Self {
        Self {
            t: 0.0,
            pressure_true: cfg.initial_pressure,
            pressure_measured: cfg.initial_pressure,
            fuel_effective_pct: 0.0,
            outlet_effective_pct: 0.0,
        }
    }
}

/// One forward-Euler step of the separator mass balance. Noise only affects
/// the measurement.
pub fn pressure_step(cfg: &PlantConfig, state: &PlantState, fuel_pct: f64, outlet_pct: f64, noise: f64) -> PlantState {
    let fuel = fuel_pct.clamp(0.0, 100.0);
    let outlet = outlet_pct.clamp(0.0, 100.0);
    let p = (state.pressure_true + cfg.dt * cfg.rate(fuel, outlet)).max(0.0);
    PlantState {
        t: state.t + cfg.dt,
        pressure_true: p,
        pressure_measured: p + noise,
        fuel_effective_pct: fuel,
        outlet_effective_pct: outlet,
    }
}
