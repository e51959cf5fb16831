use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::pressure::{pressure_step, PlantConfig, PlantState};
use super::valve::{DelayLine, DiscreteValveModel};
use crate::controller::{Controller, ControllerConfig};
use crate::error::PlantError;
use crate::fuzzy::RuleBase;

/// Sampled closed-loop trajectory, one entry per control step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub dt: f64,
    pub setpoint: f64,
    pub initial_pressure: f64,
    pub t: Vec<f64>,
    pub pressure: Vec<f64>,
    pub fuel_cmd: Vec<f64>,
    pub outlet_cmd: Vec<f64>,
    pub fuel_eff: Vec<f64>,
    pub outlet_eff: Vec<f64>,
    /// Steps where the controller held its previous command.
    pub fault_steps: Vec<usize>,
}

impl Series {
    fn with_capacity(n: usize, dt: f64, setpoint: f64, initial_pressure: f64) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            dt,
            setpoint,
            initial_pressure,
            t: v(),
            pressure: v(),
            fuel_cmd: v(),
            outlet_cmd: v(),
            fuel_eff: v(),
            outlet_eff: v(),
            fault_steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

enum Actuator {
    Delay(DelayLine, DelayLine),
    Dynamic(Box<DiscreteValveModel>, Box<DiscreteValveModel>),
}

impl Actuator {
    fn new(cfg: &PlantConfig) -> Result<Self, PlantError> {
        Ok(if cfg.actuator_dynamics {
            let m = DiscreteValveModel::valve(cfg.dt, cfg.delay)?;
            Actuator::Dynamic(Box::new(m.clone()), Box::new(m))
        } else {
            Actuator::Delay(DelayLine::from_seconds(cfg.delay, cfg.dt), DelayLine::from_seconds(cfg.delay, cfg.dt))
        })
    }

    fn step(&mut self, fuel: f64, outlet: f64) -> (f64, f64) {
        match self {
            Actuator::Delay(f, o) => (f.push(fuel), o.push(outlet)),
            Actuator::Dynamic(f, o) => (f.step(fuel), o.step(outlet)),
        }
    }
}

/// Runs measure, control, actuate, integrate for `plant.steps()` steps.
/// Valves start closed and delay lines start empty.
pub fn run_closed_loop(
    plant: &PlantConfig,
    controller: &ControllerConfig,
    rules: &RuleBase,
    seed: u64,
) -> Result<Series, PlantError> {
    plant.validate()?;
    let mut ctrl = Controller::new(*controller, rules)?;
    let mut actuator = Actuator::new(plant)?;
    let noise = Normal::new(0.0, plant.noise_std)
        .map_err(|e| PlantError::Parameter { field: "noise_std", reason: e.to_string() })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n = plant.steps();
    let mut out = Series::with_capacity(n, plant.dt, controller.setpoint, plant.initial_pressure);
    let mut state = PlantState::initial(plant);
    for k in 0..n {
        let measured = state.pressure_true + noise.sample(&mut rng);
        let step = ctrl.step(measured);
        if step.fault {
            out.fault_steps.push(k);
        }
        let (fuel, outlet) = actuator.step(step.command.fuel_pct, step.command.outlet_pct);
        out.t.push(k as f64 * plant.dt);
        out.pressure.push(measured);
        out.fuel_cmd.push(step.command.fuel_pct);
        out.outlet_cmd.push(step.command.outlet_pct);
        out.fuel_eff.push(fuel);
        out.outlet_eff.push(outlet);
        state = pressure_step(plant, &state, fuel, outlet, 0.0);
    }
    Ok(out)
}
