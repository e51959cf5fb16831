//! ARX identification of the valve from synthetic input/output records.

mod arx;
mod generate;

pub use arx::{fit_arx, fit_percent, grid_search, model_fit_percent, residual_orthogonality, ArxModel, ArxOrder, GridResult, GridRow, MAX_ORDER};
pub use generate::{generate_valve_data, GeneratorConfig, SignalDataset};
