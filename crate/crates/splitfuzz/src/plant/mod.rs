//! Separator pressure plant with delayed, optionally dynamic, split-range
//! valves.

mod closed_loop;
mod pressure;
mod valve;

pub use closed_loop::{run_closed_loop, Series};
pub use pressure::{pressure_step, PlantConfig, PlantState, VALVE_BALANCE_FUEL_PCT, VALVE_BALANCE_OUTLET_PCT};
pub use valve::{discretize, DelayLine, DiscreteValveModel, TransferFunction, STABILITY_TOLERANCE};
