//! Split-range fuzzy pressure controller.
//!
//! One inference per step feeds two valves: the fuel inlet raises separator
//! pressure and the gas outlet lowers it.

use serde::{Deserialize, Serialize};

use crate::error::{ControlError, FuzzyError};
use crate::fuzzy::{defuzzify, DefuzzMethod, RuleBase};

pub const KPA_TO_BAR: f64 = 0.01;
pub const ERROR_LIMIT_BAR: f64 = 5.0;
pub const FUEL_VALVE: &str = "fuel_valve";
pub const OUTLET_VALVE: &str = "outlet_valve";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub setpoint: f64,
    pub defuzz: DefuzzMethod,
    pub pressure_unit_scale: f64,
}

impl ControllerConfig {
    pub fn new(setpoint: f64, defuzz: DefuzzMethod) -> Result<Self, ControlError> {
        let cfg = Self { setpoint, defuzz, pressure_unit_scale: KPA_TO_BAR };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        if !(0.0..=10.0).contains(&self.setpoint) {
            return Err(ControlError::Setpoint(self.setpoint));
        }
        if !(self.pressure_unit_scale > 0.0 && self.pressure_unit_scale.is_finite()) {
            return Err(ControlError::UnitScale(self.pressure_unit_scale));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValveCommand {
    pub fuel_pct: f64,
    pub outlet_pct: f64,
}

impl ValveCommand {
    pub fn new(fuel_pct: f64, outlet_pct: f64) -> Self {
        Self { fuel_pct: fuel_pct.clamp(0.0, 100.0), outlet_pct: outlet_pct.clamp(0.0, 100.0) }
    }
}

/// `setpoint - measured`, clamped to the error universe.
pub fn compute_error(setpoint: f64, measured: f64) -> f64 {
    (setpoint - measured).clamp(-ERROR_LIMIT_BAR, ERROR_LIMIT_BAR)
}

pub fn convert_units(raw_kpa: f64) -> Result<f64, ControlError> {
    if raw_kpa < 0.0 || raw_kpa.is_nan() {
        return Err(ControlError::NegativePressure(raw_kpa));
    }
    Ok(raw_kpa * KPA_TO_BAR)
}

/// Stateless apart from the last command, which is held if inference ever
/// yields an empty output set.
#[derive(Debug, Clone)]
pub struct Controller<'a> {
    cfg: ControllerConfig,
    rules: &'a RuleBase,
    fuel: usize,
    outlet: usize,
    last: ValveCommand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub command: ValveCommand,
    pub error: f64,
    pub fault: bool,
}

impl<'a> Controller<'a> {
    pub fn new(cfg: ControllerConfig, rules: &'a RuleBase) -> Result<Self, ControlError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            rules,
            fuel: rules.output_index(FUEL_VALVE)?,
            outlet: rules.output_index(OUTLET_VALVE)?,
            last: ValveCommand::default(),
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn step(&mut self, measured_bar: f64) -> StepOutput {
        let error = compute_error(self.cfg.setpoint, measured_bar);
        match self.command_for(error) {
            Ok(command) => {
                self.last = command;
                StepOutput { command, error, fault: false }
            }
            Err(_) => StepOutput { command: self.last, error, fault: true },
        }
    }

    /// Same as [`Controller::step`] but reads the sensor in kPa.
    pub fn step_kpa(&mut self, measured_kpa: f64) -> Result<StepOutput, ControlError> {
        let bar = measured_kpa * self.cfg.pressure_unit_scale;
        if measured_kpa < 0.0 || measured_kpa.is_nan() {
            return Err(ControlError::NegativePressure(measured_kpa));
        }
        Ok(self.step(bar))
    }

    fn command_for(&self, error: f64) -> Result<ValveCommand, FuzzyError> {
        let sets = self.rules.infer_all(error)?;
        let f = defuzzify(&sets[self.fuel], self.cfg.defuzz)?;
        let o = defuzzify(&sets[self.outlet], self.cfg.defuzz)?;
        Ok(ValveCommand::new(f, o))
    }
}

/// Valve commands for a given error without a controller instance.
pub fn control_step(cfg: &ControllerConfig, measured_bar: f64, rules: &RuleBase) -> Result<ValveCommand, ControlError> {
    let mut c = Controller::new(*cfg, rules)?;
    let out = c.step(measured_bar);
    if out.fault {
        return Err(FuzzyError::NoRuleFired.into());
    }
    Ok(out.command)
}
