//! Resolved run descriptions shared by the CLI and the HTTP service, so both
//! produce identical numbers and identical run ids.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use splitfuzz::config::{Document, VariableSpec};
use splitfuzz::metrics::evaluate_series;
use splitfuzz::{run_closed_loop, ControllerConfig, DefuzzMethod, MetricsReport, PlantConfig, RuleBase, Series};

/// Everything that determines a single simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub setpoint: f64,
    pub method: DefuzzMethod,
    pub band_pct: f64,
    pub seed: u64,
    pub plant: PlantConfig,
}

/// Which HTTP status class a validation problem maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Malformed or out-of-contract value.
    Invalid,
    /// Well-formed but physically infeasible.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
    pub severity: Severity,
}

impl FieldError {
    pub fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Self { field, message: message.into(), severity: Severity::Invalid }
    }
}

pub fn describe(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("{}: {}", e.field, e.message)).collect::<Vec<_>>().join("; ")
}

fn finite_non_negative(out: &mut Vec<FieldError>, field: &'static str, v: f64) {
    if !v.is_finite() || v < 0.0 {
        out.push(FieldError::invalid(field, format!("{v} must be a finite non-negative number")));
    }
}

impl RunSpec {
    pub fn from_document(doc: &Document, seed: u64) -> Self {
        Self {
            setpoint: doc.controller.setpoint,
            method: doc.controller.method,
            band_pct: doc.controller.band_pct,
            seed,
            plant: doc.plant,
        }
    }

    /// Field names follow the HTTP request body.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut out = Vec::new();
        let p = &self.plant;
        if !self.setpoint.is_finite() || self.setpoint <= 0.0 || self.setpoint > 10.0 {
            out.push(FieldError::invalid(
                "setpoint",
                format!("{} must lie in (0, 10] bar; percentage metrics are undefined at 0", self.setpoint),
            ));
        }
        if self.band_pct != 2.0 && self.band_pct != 5.0 {
            out.push(FieldError::invalid("band", format!("{} must be 2 or 5", self.band_pct)));
        }
        finite_non_negative(&mut out, "fuel_gain", p.fuel_gain);
        finite_non_negative(&mut out, "outlet_gain", p.outlet_gain);
        finite_non_negative(&mut out, "fuel_flow", p.fuel_flow);
        finite_non_negative(&mut out, "base_outflow", p.base_outflow);
        finite_non_negative(&mut out, "noise", p.noise_std);
        finite_non_negative(&mut out, "delay", p.delay);
        if !(p.dt > 0.0 && p.dt.is_finite()) {
            out.push(FieldError::invalid("dt", format!("{} must be positive", p.dt)));
        } else if !(p.duration.is_finite() && p.duration >= p.dt) {
            out.push(FieldError::invalid("total_time", format!("{} must be at least one step of {}", p.duration, p.dt)));
        } else if p.duration / p.dt > 1e6 {
            out.push(FieldError::invalid("total_time", "more than 10^6 steps"));
        }
        if !p.initial_pressure.is_finite() {
            out.push(FieldError::invalid("initial_pressure", "must be a finite number"));
        } else if !(0.0..=10.0).contains(&p.initial_pressure) {
            out.push(FieldError {
                field: "initial_pressure",
                message: format!("{} bar is outside the separator range [0, 10]", p.initial_pressure),
                severity: Severity::Infeasible,
            });
        }
        out
    }

    pub fn ipe(&self) -> f64 {
        self.setpoint - self.plant.initial_pressure
    }
}

/// Stable digest of the rule base, so a changed configuration gets a new
/// run id.
pub fn rules_fingerprint(rules: &RuleBase) -> String {
    let mut vars = vec![VariableSpec::from_variable(rules.input())];
    vars.extend(rules.outputs().iter().map(VariableSpec::from_variable));
    let doc = serde_json::json!({ "variables": vars, "rules": rules.rules() });
    short_hash(&doc.to_string())
}

pub fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(digest)[..12].to_string()
}

pub fn run_id<T: Serialize>(kind: &str, spec: &T, rules: &RuleBase) -> String {
    let body = serde_json::json!({ "kind": kind, "spec": spec, "rules": rules_fingerprint(rules) });
    short_hash(&body.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutput {
    pub run_id: String,
    pub spec: RunSpec,
    pub series: Series,
    pub metrics: MetricsReport,
}

pub fn simulate(spec: &RunSpec, rules: &RuleBase) -> Result<SimulationOutput, String> {
    let errors = spec.validate();
    if !errors.is_empty() {
        return Err(describe(&errors));
    }
    let ctrl = ControllerConfig::new(spec.setpoint, spec.method).map_err(|e| e.to_string())?;
    let series = run_closed_loop(&spec.plant, &ctrl, rules, spec.seed).map_err(|e| e.to_string())?;
    let metrics = evaluate_series(&series, spec.band_pct).map_err(|e| e.to_string())?;
    Ok(SimulationOutput { run_id: run_id("simulate", spec, rules), spec: spec.clone(), series, metrics })
}

pub fn simulate_file_stem(out: &SimulationOutput) -> String {
    format!("simulate-{}-{}", out.spec.method, out.run_id)
}
