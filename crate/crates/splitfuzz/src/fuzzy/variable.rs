use serde::Serialize;

use super::membership::{MembershipFunction, Universe};
use crate::error::FuzzyError;

pub const ERROR_LABELS: [&str; 5] =
    ["Very negative", "Negative", "Small", "Positive", "Very positive"];
pub const VALVE_LABELS: [&str; 5] =
    ["Fully closed", "Mostly closed", "Half open", "Mostly open", "Fully open"];

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    /// Alternative labels accepted when rules reference this term.
    pub aliases: Vec<String>,
    pub mf: MembershipFunction,
}

impl Term {
    pub fn new(label: impl Into<String>, mf: MembershipFunction) -> Self {
        Self { label: label.into(), aliases: Vec::new(), mf }
    }

    pub fn with_alias(mut self, alias: impl Into<String>) -> Self {
        self.aliases.push(alias.into());
        self
    }

    pub fn answers_to(&self, label: &str) -> bool {
        self.label == label || self.aliases.iter().any(|a| a == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    universe: Universe,
    terms: Vec<Term>,
}

impl LinguisticVariable {
    /// Validates label uniqueness and that every sample of the universe is
    /// covered by at least one term.
    pub fn new(name: impl Into<String>, universe: Universe, terms: Vec<Term>) -> Result<Self, FuzzyError> {
        let name = name.into();
        let err = |reason: String| FuzzyError::Variable { variable: name.clone(), reason };
        if terms.is_empty() {
            return Err(err("no terms".into()));
        }
        let mut seen: Vec<&str> = Vec::new();
        for t in &terms {
            for l in std::iter::once(&t.label).chain(&t.aliases) {
                if seen.contains(&l.as_str()) {
                    return Err(err(format!("duplicate label `{l}`")));
                }
                seen.push(l);
            }
        }
        for i in 0..universe.resolution() {
            let x = universe.point(i);
            if terms.iter().all(|t| t.mf.eval(x) <= 0.0) {
                return Err(err(format!("no term covers x = {x}")));
            }
        }
        Ok(Self { name, universe, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_index(&self, label: &str) -> Result<usize, FuzzyError> {
        self.terms.iter().position(|t| t.answers_to(label)).ok_or_else(|| FuzzyError::UnknownTerm {
            variable: self.name.clone(),
            label: label.to_string(),
        })
    }

    pub fn term(&self, label: &str) -> Result<&Term, FuzzyError> {
        self.term_index(label).map(|i| &self.terms[i])
    }

    /// Degrees of every term at `x` after clamping to the universe.
    pub fn fuzzify(&self, x: f64) -> Vec<f64> {
        let x = self.universe.clamp(x);
        self.terms.iter().map(|t| t.mf.eval(x)).collect()
    }

    pub fn curves(&self) -> VariableCurves {
        VariableCurves {
            name: self.name.clone(),
            lower: self.universe.lower(),
            upper: self.universe.upper(),
            x: self.universe.points(),
            terms: self
                .terms
                .iter()
                .map(|t| TermCurve {
                    label: t.label.clone(),
                    kind: t.mf.kind(),
                    breakpoints: t.mf.breakpoints(),
                    degrees: t.mf.sample(&self.universe),
                })
                .collect(),
        }
    }
}

/// Sampled view of a variable, used for plotting and the HTTP API.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableCurves {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub x: Vec<f64>,
    pub terms: Vec<TermCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermCurve {
    pub label: String,
    pub kind: super::MfKind,
    pub breakpoints: Vec<f64>,
    pub degrees: Vec<f64>,
}

/// Evenly spaced terms with 50% overlap. Interior terms are triangles; the
/// first and last are shoulders that saturate at the universe bounds.
pub fn uniform_partition(
    name: &str,
    universe: Universe,
    labels: &[&str],
) -> Result<LinguisticVariable, FuzzyError> {
    let n = labels.len();
    if n < 2 {
        return Err(FuzzyError::Variable {
            variable: name.to_string(),
            reason: "a partition needs at least two terms".into(),
        });
    }
    let (lo, hi) = (universe.lower(), universe.upper());
    let w = (hi - lo) / (n - 1) as f64;
    let center = |i: usize| if i + 1 == n { hi } else { lo + i as f64 * w };
    let terms = labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let c = center(i);
            let mf = if i == 0 {
                MembershipFunction::trapezoid(lo, lo, lo, center(1))
            } else if i + 1 == n {
                MembershipFunction::trapezoid(center(i - 1), hi, hi, hi)
            } else {
                MembershipFunction::triangle(center(i - 1), c, center(i + 1))
            }?;
            Ok(Term::new(*label, mf))
        })
        .collect::<Result<Vec<_>, FuzzyError>>()?;
    LinguisticVariable::new(name, universe, terms)
}

/// Pressure error in bar on [-5, 5]. The middle term also answers to
/// "Almost absent".
pub fn default_error_variable() -> LinguisticVariable {
    let u = Universe::new(-5.0, 5.0, 1001).expect("static universe");
    let mut v = uniform_partition("pressure_error", u, &ERROR_LABELS).expect("static partition");
    v.terms[2].aliases.push("Almost absent".into());
    v
}

pub fn default_valve_variable(name: &str) -> LinguisticVariable {
    let u = Universe::new(0.0, 100.0, 1001).expect("static universe");
    uniform_partition(name, u, &VALVE_LABELS).expect("static partition")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_partition_centers() {
        let v = default_error_variable();
        let cores: Vec<f64> = v.terms().iter().map(|t| t.mf.core().0).collect();
        assert_eq!(cores, vec![-5.0, -2.5, 0.0, 2.5, 5.0]);
        let fz = v.fuzzify(3.75);
        assert_eq!(fz, vec![0.0, 0.0, 0.0, 0.5, 0.5]);
        assert_eq!(v.term_index("Almost absent").unwrap(), 2);
    }

    #[test]
    fn gap_in_coverage_is_rejected() {
        let u = Universe::new(0.0, 10.0, 11).unwrap();
        let terms = vec![
            Term::new("a", MembershipFunction::triangle(0.0, 1.0, 3.0).unwrap()),
            Term::new("b", MembershipFunction::triangle(5.0, 8.0, 10.0).unwrap()),
        ];
        assert!(LinguisticVariable::new("x", u, terms).is_err());
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let u = Universe::new(0.0, 1.0, 3).unwrap();
        let mf = MembershipFunction::trapezoid(0.0, 0.0, 1.0, 1.0).unwrap();
        let terms = vec![Term::new("a", mf.clone()), Term::new("a", mf)];
        assert!(LinguisticVariable::new("x", u, terms).is_err());
    }
}
