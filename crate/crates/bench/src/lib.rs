//! Shared fixtures for the criterion benches.

use splitfuzz::sysid::{generate_valve_data, GeneratorConfig, SignalDataset};
use splitfuzz::{PlantConfig, SweepConfig};

pub fn protocol_dataset(seed: u64) -> SignalDataset {
    generate_valve_data(1000, 0.5, seed, &GeneratorConfig::default()).expect("static generator")
}

pub fn far_start(initial_pressure: f64) -> PlantConfig {
    PlantConfig { initial_pressure, ..PlantConfig::default() }
}

pub fn single_method_sweep(method: splitfuzz::DefuzzMethod) -> SweepConfig {
    SweepConfig { methods: vec![method], ..SweepConfig::default() }
}
