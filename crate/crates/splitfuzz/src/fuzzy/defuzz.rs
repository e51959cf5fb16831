use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sets::AggregatedSet;
use crate::error::FuzzyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefuzzMethod {
    Centroid,
    Bisector,
    /// Mean of maximum.
    Mom,
    /// Largest of maximum.
    Lom,
    /// Smallest of maximum.
    Som,
}

impl DefuzzMethod {
    pub const ALL: [DefuzzMethod; 5] = [
        DefuzzMethod::Lom,
        DefuzzMethod::Som,
        DefuzzMethod::Mom,
        DefuzzMethod::Bisector,
        DefuzzMethod::Centroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefuzzMethod::Centroid => "centroid",
            DefuzzMethod::Bisector => "bisector",
            DefuzzMethod::Mom => "mom",
            DefuzzMethod::Lom => "lom",
            DefuzzMethod::Som => "som",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            DefuzzMethod::Centroid => "Centroid",
            DefuzzMethod::Bisector => "Bisector",
            DefuzzMethod::Mom => "Middle of maximum",
            DefuzzMethod::Lom => "Largest of maximum",
            DefuzzMethod::Som => "Smallest of maximum",
        }
    }

    pub fn names() -> String {
        Self::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for DefuzzMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefuzzMethod {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "centroid" => Ok(DefuzzMethod::Centroid),
            "bisector" => Ok(DefuzzMethod::Bisector),
            "mom" => Ok(DefuzzMethod::Mom),
            "lom" => Ok(DefuzzMethod::Lom),
            "som" => Ok(DefuzzMethod::Som),
            _ => Err(FuzzyError::UnknownMethod(s.to_string())),
        }
    }
}

pub fn defuzzify(set: &AggregatedSet, method: DefuzzMethod) -> Result<f64, FuzzyError> {
    let mu = set.degrees();
    let u = set.universe();
    let peak = set.max_degree();
    if peak <= 0.0 {
        return Err(FuzzyError::NoRuleFired);
    }
    let x = match method {
        DefuzzMethod::Centroid => {
            let (mut num, mut den) = (0.0, 0.0);
            for (i, &m) in mu.iter().enumerate() {
                num += u.point(i) * m;
                den += m;
            }
            num / den
        }
        DefuzzMethod::Bisector => {
            let half = mu.iter().sum::<f64>() / 2.0;
            let mut acc = 0.0;
            let mut at = mu.len() - 1;
            for (i, &m) in mu.iter().enumerate() {
                acc += m;
                if acc >= half {
                    at = i;
                    break;
                }
            }
            u.point(at)
        }
        DefuzzMethod::Som => u.point(mu.iter().position(|&m| m == peak).expect("peak exists")),
        DefuzzMethod::Lom => u.point(mu.iter().rposition(|&m| m == peak).expect("peak exists")),
        DefuzzMethod::Mom => {
            let (sum, n) = mu
                .iter()
                .enumerate()
                .filter(|(_, &m)| m == peak)
                .fold((0.0, 0usize), |(s, n), (i, _)| (s + u.point(i), n + 1));
            sum / n as f64
        }
    };
    Ok(x.clamp(u.lower(), u.upper()))
}
