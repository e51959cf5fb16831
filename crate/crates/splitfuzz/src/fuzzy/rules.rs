use serde::{Deserialize, Serialize};

use super::sets::AggregatedSet;
use super::variable::{default_error_variable, default_valve_variable, LinguisticVariable};
use crate::error::FuzzyError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRef {
    pub variable: String,
    pub term: String,
}

impl TermRef {
    pub fn new(variable: impl Into<String>, term: impl Into<String>) -> Self {
        Self { variable: variable.into(), term: term.into() }
    }
}

/// `IF antecedent THEN consequent_1 AND consequent_2 ...`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: TermRef,
    pub consequents: Vec<TermRef>,
}

#[derive(Debug, Clone)]
struct Compiled {
    input_term: usize,
    /// (output index, term index)
    outputs: Vec<(usize, usize)>,
}

/// Single-input Mamdani rule base with min-clip implication and max
/// aggregation.
#[derive(Debug, Clone)]
pub struct RuleBase {
    input: LinguisticVariable,
    outputs: Vec<LinguisticVariable>,
    rules: Vec<Rule>,
    compiled: Vec<Compiled>,
    /// Consequent terms sampled on their universes, indexed [output][term].
    sampled: Vec<Vec<Vec<f64>>>,
}

impl RuleBase {
    pub fn new(
        input: LinguisticVariable,
        outputs: Vec<LinguisticVariable>,
        rules: Vec<Rule>,
    ) -> Result<Self, FuzzyError> {
        let mut compiled = Vec::with_capacity(rules.len());
        for r in &rules {
            if r.antecedent.variable != input.name() {
                return Err(FuzzyError::UnknownVariable(r.antecedent.variable.clone()));
            }
            let input_term = input.term_index(&r.antecedent.term)?;
            let mut outs = Vec::with_capacity(r.consequents.len());
            for c in &r.consequents {
                let oi = outputs
                    .iter()
                    .position(|o| o.name() == c.variable)
                    .ok_or_else(|| FuzzyError::UnknownVariable(c.variable.clone()))?;
                outs.push((oi, outputs[oi].term_index(&c.term)?));
            }
            compiled.push(Compiled { input_term, outputs: outs });
        }
        let sampled = outputs
            .iter()
            .map(|o| o.terms().iter().map(|t| t.mf.sample(o.universe())).collect())
            .collect();
        Ok(Self { input, outputs, rules, compiled, sampled })
    }

    pub fn input(&self) -> &LinguisticVariable {
        &self.input
    }

    pub fn outputs(&self) -> &[LinguisticVariable] {
        &self.outputs
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn output_index(&self, name: &str) -> Result<usize, FuzzyError> {
        self.outputs
            .iter()
            .position(|o| o.name() == name)
            .ok_or_else(|| FuzzyError::UnknownVariable(name.to_string()))
    }

    /// Firing strength of every rule for a crisp input (clamped to the
    /// input universe).
    pub fn firing_strengths(&self, input: f64) -> Vec<f64> {
        let x = self.input.universe().clamp(input);
        let terms = self.input.terms();
        self.compiled.iter().map(|c| terms[c.input_term].mf.eval(x)).collect()
    }

    pub fn infer(&self, input: f64, output: &str) -> Result<AggregatedSet, FuzzyError> {
        let oi = self.output_index(output)?;
        Ok(self.infer_all(input)?.swap_remove(oi))
    }

    /// Aggregated set for every output variable, in declaration order.
    pub fn infer_all(&self, input: f64) -> Result<Vec<AggregatedSet>, FuzzyError> {
        if self.compiled.is_empty() {
            return Err(FuzzyError::EmptyRuleBase);
        }
        let strengths = self.firing_strengths(input);
        let mut sets: Vec<AggregatedSet> =
            self.outputs.iter().map(|o| AggregatedSet::zeros(*o.universe())).collect();
        for (c, &s) in self.compiled.iter().zip(&strengths) {
            if s <= 0.0 {
                continue;
            }
            for &(oi, ti) in &c.outputs {
                sets[oi].absorb_clipped(&self.sampled[oi][ti], s);
            }
        }
        Ok(sets)
    }
}

/// The five split-range rules: pressure error drives the fuel inlet valve
/// and the gas outlet valve in opposite directions.
pub fn default_rule_base() -> RuleBase {
    let table = [
        ("Very positive", "Fully open", "Fully closed"),
        ("Positive", "Mostly open", "Fully closed"),
        ("Almost absent", "Fully closed", "Mostly closed"),
        ("Negative", "Fully closed", "Mostly open"),
        ("Very negative", "Fully closed", "Fully open"),
    ];
    let rules = table
        .iter()
        .map(|(e, f, o)| Rule {
            antecedent: TermRef::new("pressure_error", *e),
            consequents: vec![TermRef::new("fuel_valve", *f), TermRef::new("outlet_valve", *o)],
        })
        .collect();
    RuleBase::new(
        default_error_variable(),
        vec![default_valve_variable("fuel_valve"), default_valve_variable("outlet_valve")],
        rules,
    )
    .expect("static rule base")
}
