//! TOML run configuration. Every section is optional and falls back to the
//! compiled-in defaults.
//!
//! ```toml
//! [plant]
//! fuel_gain = 2.0
//!
//! [controller]
//! setpoint = 5.0
//! method = "bisector"
//!
//! [[variables]]
//! name = "pressure_error"
//! lower = -5.0
//! upper = 5.0
//! terms = [
//!   { label = "Very negative", kind = "trapezoid", breakpoints = [-5.0, -5.0, -5.0, -2.5] },
//!   # ...
//! ]
//!
//! [[rules]]
//! antecedent = { variable = "pressure_error", term = "Very positive" }
//! consequents = [
//!   { variable = "fuel_valve", term = "Fully open" },
//!   { variable = "outlet_valve", term = "Fully closed" },
//! ]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, FuzzyError};
use crate::fuzzy::{
    default_error_variable, default_rule_base, default_valve_variable, LinguisticVariable, MembershipFunction, MfKind,
    Rule, RuleBase, Term, Universe,
};
use crate::plant::PlantConfig;
use crate::sysid::GeneratorConfig;
use crate::DefuzzMethod;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub setpoint: f64,
    pub method: DefuzzMethod,
    pub band_pct: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self { setpoint: 5.0, method: DefuzzMethod::Centroid, band_pct: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub label: String,
    pub kind: MfKind,
    pub breakpoints: Vec<f64>,
    #[serde(default)]
    pub aliases: Vec<String>,
}

fn default_resolution() -> usize {
    1001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    pub terms: Vec<TermSpec>,
}

impl VariableSpec {
    pub fn build(&self) -> Result<LinguisticVariable, FuzzyError> {
        let u = Universe::new(self.lower, self.upper, self.resolution)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mf = MembershipFunction::from_breakpoints(t.kind, &t.breakpoints)?;
                Ok(Term { label: t.label.clone(), aliases: t.aliases.clone(), mf })
            })
            .collect::<Result<Vec<_>, FuzzyError>>()?;
        LinguisticVariable::new(self.name.clone(), u, terms)
    }

    pub fn from_variable(v: &LinguisticVariable) -> Self {
        Self {
            name: v.name().to_string(),
            lower: v.universe().lower(),
            upper: v.universe().upper(),
            resolution: v.universe().resolution(),
            terms: v
                .terms()
                .iter()
                .map(|t| TermSpec {
                    label: t.label.clone(),
                    kind: t.mf.kind(),
                    breakpoints: t.mf.breakpoints(),
                    aliases: t.aliases.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Document {
    pub plant: PlantConfig,
    pub controller: ControllerSection,
    pub sysid: GeneratorConfig,
    /// Name of the rule input; defaults to `pressure_error`.
    pub input: Option<String>,
    /// Replace the default variable of the same name, or add a new one.
    pub variables: Vec<VariableSpec>,
    /// When present, replaces the whole default rule table.
    pub rules: Option<Vec<Rule>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc: Document = toml::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.plant.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let c = &self.controller;
        if !(c.setpoint > 0.0 && c.setpoint <= 10.0) {
            return Err(ConfigError::Invalid(format!("setpoint {} must lie in (0, 10] bar", c.setpoint)));
        }
        if c.band_pct != 2.0 && c.band_pct != 5.0 {
            return Err(ConfigError::Invalid(format!("band_pct {} must be 2 or 5", c.band_pct)));
        }
        self.rule_base()?;
        Ok(())
    }

    pub fn rule_base(&self) -> Result<RuleBase, ConfigError> {
        if self.variables.is_empty() && self.rules.is_none() && self.input.is_none() {
            return Ok(default_rule_base());
        }
        let mut vars = vec![
            default_error_variable(),
            default_valve_variable("fuel_valve"),
            default_valve_variable("outlet_valve"),
        ];
        for spec in &self.variables {
            let v = spec.build()?;
            match vars.iter().position(|x| x.name() == v.name()) {
                Some(i) => vars[i] = v,
                None => vars.push(v),
            }
        }
        let input_name = self.input.clone().unwrap_or_else(|| "pressure_error".into());
        let i = vars
            .iter()
            .position(|v| v.name() == input_name)
            .ok_or_else(|| ConfigError::Invalid(format!("input variable `{input_name}` is not defined")))?;
        let input = vars.remove(i);
        let rules = match &self.rules {
            Some(r) => r.clone(),
            None => default_rule_base().rules().to_vec(),
        };
        if rules.is_empty() {
            return Err(ConfigError::Invalid("rule list is empty".into()));
        }
        Ok(RuleBase::new(input, vars, rules)?)
    }

    /// Full document with every default spelled out.
    pub fn defaults_toml() -> String {
        let rb = default_rule_base();
        let mut vars = vec![VariableSpec::from_variable(rb.input())];
        vars.extend(rb.outputs().iter().map(VariableSpec::from_variable));
        let doc = Document {
            input: Some(rb.input().name().to_string()),
            variables: vars,
            rules: Some(rb.rules().to_vec()),
            ..Document::default()
        };
        toml::to_string(&doc).expect("document serializes")
    }
}
