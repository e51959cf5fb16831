use serde::{Deserialize, Serialize};

use crate::error::FuzzyError;

/// Uniformly sampled closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    lower: f64,
    upper: f64,
    resolution: usize,
}

impl Universe {
    pub fn new(lower: f64, upper: f64, resolution: usize) -> Result<Self, FuzzyError> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(FuzzyError::Universe(format!(
                "bounds [{lower}, {upper}] must be finite with lower < upper"
            )));
        }
        if resolution < 2 {
            return Err(FuzzyError::Universe(format!(
                "resolution {resolution} must be at least 2"
            )));
        }
        Ok(Self { lower, upper, resolution })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn span(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn step(&self) -> f64 {
        self.span() / (self.resolution - 1) as f64
    }

    /// Abscissa of sample `i`. The last sample is exactly `upper`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.resolution {
            self.upper
        } else {
            self.lower + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.resolution).map(|i| self.point(i)).collect()
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MfKind {
    Triangle,
    Trapezoid,
}

/// Piecewise-linear membership function. Coincident breakpoints give a
/// vertical edge, so `(lo, lo, lo, c)` is a left shoulder on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipFunction {
    kind: MfKind,
    pts: [f64; 4],
}

impl MembershipFunction {
    pub fn triangle(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        check(&[a, b, c])?;
        Ok(Self { kind: MfKind::Triangle, pts: [a, b, b, c] })
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        check(&[a, b, c, d])?;
        Ok(Self { kind: MfKind::Trapezoid, pts: [a, b, c, d] })
    }

    pub fn from_breakpoints(kind: MfKind, points: &[f64]) -> Result<Self, FuzzyError> {
        match (kind, points) {
            (MfKind::Triangle, &[a, b, c]) => Self::triangle(a, b, c),
            (MfKind::Trapezoid, &[a, b, c, d]) => Self::trapezoid(a, b, c, d),
            _ => Err(FuzzyError::Breakpoints {
                points: points.to_vec(),
                reason: format!("{kind:?} needs {} breakpoints", kind.arity()),
            }),
        }
    }

    pub fn kind(&self) -> MfKind {
        self.kind
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            MfKind::Triangle => vec![self.pts[0], self.pts[1], self.pts[3]],
            MfKind::Trapezoid => self.pts.to_vec(),
        }
    }

    /// Abscissa interval where the degree is 1.
    pub fn core(&self) -> (f64, f64) {
        (self.pts[1], self.pts[2])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let [a, b, c, d] = self.pts;
        if x < a || x > d {
            0.0
        } else if x < b {
            (x - a) / (b - a)
        } else if x > c {
            (d - x) / (d - c)
        } else {
            1.0
        }
    }

    pub fn sample(&self, universe: &Universe) -> Vec<f64> {
        (0..universe.resolution()).map(|i| self.eval(universe.point(i))).collect()
    }
}

impl MfKind {
    pub fn arity(self) -> usize {
        match self {
            MfKind::Triangle => 3,
            MfKind::Trapezoid => 4,
        }
    }
}

fn check(points: &[f64]) -> Result<(), FuzzyError> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(FuzzyError::Breakpoints {
            points: points.to_vec(),
            reason: "breakpoints must be finite".into(),
        });
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(FuzzyError::Breakpoints {
            points: points.to_vec(),
            reason: "breakpoints must be non-decreasing".into(),
        });
    }
    Ok(())
}
