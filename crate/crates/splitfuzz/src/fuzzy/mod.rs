//! Fuzzy sets over sampled universes, single-antecedent Mamdani rules and
//! crisp output extraction.

mod defuzz;
mod membership;
mod rules;
mod sets;
mod variable;

pub use defuzz::{defuzzify, DefuzzMethod};
pub use membership::{MembershipFunction, MfKind, Universe};
pub use rules::{default_rule_base, Rule, RuleBase, TermRef};
pub use sets::{alpha_cut, alpha_intersection, alpha_union, AggregatedSet, CrispSet};
pub use variable::{
    default_error_variable, default_valve_variable, uniform_partition, LinguisticVariable, Term,
    TermCurve, VariableCurves, ERROR_LABELS, VALVE_LABELS,
};
