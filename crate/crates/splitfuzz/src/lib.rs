//! Fuzzy split-range pressure control of a three-phase separator.
//!
//! The crate bundles the Mamdani inference engine, the closed-loop plant with
//! identified valve dynamics, ARX identification, loop metrics and the batch
//! sweep used to compare defuzzification methods.

pub mod config;
pub mod controller;
pub mod error;
pub mod fuzzy;
pub mod io;
pub mod metrics;
pub mod plant;
pub mod plot;
pub mod scenario;
pub mod sysid;

pub use controller::{compute_error, control_step, convert_units, Controller, ControllerConfig, ValveCommand};
pub use error::{ConfigError, ControlError, FuzzyError, MetricsError, PlantError, ScenarioError, SysIdError};
pub use fuzzy::{
    defuzzify, default_rule_base, AggregatedSet, DefuzzMethod, LinguisticVariable, MembershipFunction, Rule,
    RuleBase, Universe,
};
pub use metrics::{Direction, MetricsReport};
pub use plant::{run_closed_loop, DiscreteValveModel, PlantConfig, PlantState, Series};
pub use scenario::{run_sweep, SweepConfig, SweepReport};
pub use sysid::{ArxModel, ArxOrder, SignalDataset};
