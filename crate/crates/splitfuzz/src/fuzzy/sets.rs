use serde::Serialize;

use super::membership::{MembershipFunction, Universe};
use crate::error::FuzzyError;

/// Fuzzy set sampled on a universe. Produced by Mamdani aggregation and
/// consumed by defuzzification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedSet {
    universe: Universe,
    degrees: Vec<f64>,
}

impl AggregatedSet {
    pub fn new(universe: Universe, degrees: Vec<f64>) -> Result<Self, FuzzyError> {
        if degrees.len() != universe.resolution() {
            return Err(FuzzyError::Universe(format!(
                "{} degrees for a universe of {} samples",
                degrees.len(),
                universe.resolution()
            )));
        }
        if let Some((i, &d)) = degrees.iter().enumerate().find(|(_, d)| !(0.0..=1.0).contains(*d)) {
            return Err(FuzzyError::Degree(d, i));
        }
        Ok(Self { universe, degrees })
    }

    pub fn zeros(universe: Universe) -> Self {
        Self { universe, degrees: vec![0.0; universe.resolution()] }
    }

    pub fn from_mf(mf: &MembershipFunction, universe: Universe) -> Self {
        Self { universe, degrees: mf.sample(&universe) }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    /// Folds `min(strength, consequent)` into the set with pointwise max.
    pub(crate) fn absorb_clipped(&mut self, consequent: &[f64], strength: f64) {
        for (d, &c) in self.degrees.iter_mut().zip(consequent) {
            *d = d.max(c.min(strength));
        }
    }

    pub fn pointwise_max(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.combine(other, f64::max)
    }

    pub fn pointwise_min(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.combine(other, f64::min)
    }

    fn combine(&self, other: &Self, f: fn(f64, f64) -> f64) -> Result<Self, FuzzyError> {
        if self.universe != other.universe {
            return Err(FuzzyError::UniverseMismatch);
        }
        let degrees = self.degrees.iter().zip(&other.degrees).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { universe: self.universe, degrees })
    }

    pub fn alpha_cut(&self, alpha: f64) -> Result<CrispSet, FuzzyError> {
        check_alpha(alpha)?;
        let indices = self
            .degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d >= alpha)
            .map(|(i, _)| i)
            .collect();
        Ok(CrispSet { universe: self.universe, indices })
    }
}

/// Crisp subset of a sampled universe, stored as sorted sample indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispSet {
    universe: Universe,
    indices: Vec<usize>,
}

impl CrispSet {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn points(&self) -> Vec<f64> {
        self.indices.iter().map(|&i| self.universe.point(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.universe == other.universe
            && self.indices.iter().all(|i| other.indices.binary_search(i).is_ok())
    }

    pub fn union(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.merge(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.merge(other, |a, b| a && b)
    }

    fn merge(&self, other: &Self, keep: fn(bool, bool) -> bool) -> Result<Self, FuzzyError> {
        if self.universe != other.universe {
            return Err(FuzzyError::UniverseMismatch);
        }
        let (a, b) = (&self.indices, &other.indices);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        while i < a.len() || j < b.len() {
            let (x, in_a, in_b) = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => (x, true, true),
                (Some(&x), Some(&y)) if x < y => (x, true, false),
                (Some(_), Some(&y)) => (y, false, true),
                (Some(&x), None) => (x, true, false),
                (None, Some(&y)) => (y, false, true),
                (None, None) => unreachable!(),
            };
            if in_a {
                i += 1;
            }
            if in_b {
                j += 1;
            }
            if keep(in_a, in_b) {
                out.push(x);
            }
        }
        Ok(Self { universe: self.universe, indices: out })
    }
}

fn check_alpha(alpha: f64) -> Result<(), FuzzyError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(FuzzyError::Alpha(alpha))
    }
}

/// Sampled points of `universe` where `mf` reaches at least `alpha`.
pub fn alpha_cut(mf: &MembershipFunction, alpha: f64, universe: &Universe) -> Result<CrispSet, FuzzyError> {
    AggregatedSet::from_mf(mf, *universe).alpha_cut(alpha)
}

pub fn alpha_union(a: &AggregatedSet, b: &AggregatedSet, alpha: f64) -> Result<CrispSet, FuzzyError> {
    a.alpha_cut(alpha)?.union(&b.alpha_cut(alpha)?)
}

pub fn alpha_intersection(a: &AggregatedSet, b: &AggregatedSet, alpha: f64) -> Result<CrispSet, FuzzyError> {
    a.alpha_cut(alpha)?.intersection(&b.alpha_cut(alpha)?)
}
