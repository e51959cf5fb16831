use std::collections::VecDeque;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::PlantError;

/// Spectral radius allowed above 1 before a discretization is rejected. The
/// identified valve has a lightly damped pole pair that sits on the
/// imaginary axis to within 1e-7, so exact unit-circle checks are too strict.
pub const STABILITY_TOLERANCE: f64 = 1e-6;

/// Continuous-time transfer function, coefficients in descending powers of s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl TransferFunction {
    /// Identified fuel/outlet valve response.
    pub fn valve() -> Self {
        Self { num: vec![0.4455, -1.14e-5, 0.003544], den: vec![1.0, 0.447, 0.007935, 0.003547] }
    }

    pub fn dc_gain(&self) -> f64 {
        self.num.last().copied().unwrap_or(0.0) / self.den.last().copied().unwrap_or(f64::NAN)
    }
}

/// Pure transport delay of `len` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine {
    buf: VecDeque<f64>,
}

impl DelayLine {
    pub fn new(len: usize, fill: f64) -> Self {
        Self { buf: std::iter::repeat_n(fill, len).collect() }
    }

    pub fn from_seconds(delay: f64, dt: f64) -> Self {
        Self::new(delay_samples(delay, dt), 0.0)
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn push(&mut self, x: f64) -> f64 {
        if self.buf.is_empty() {
            return x;
        }
        self.buf.push_back(x);
        self.buf.pop_front().expect("non-empty")
    }
}

pub(crate) fn delay_samples(delay: f64, dt: f64) -> usize {
    (delay / dt).round().max(0.0) as usize
}

/// Third-order valve model discretized with the bilinear transform, fed
/// through an input delay line.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteValveModel {
    ad: Matrix3<f64>,
    bd: Vector3<f64>,
    cd: Vector3<f64>,
    dd: f64,
    dt: f64,
    x: Vector3<f64>,
    delay: DelayLine,
}

/// Realizes `tf` in controllable canonical form and maps it to discrete time
/// with the trapezoidal rule at step `dt`.
pub fn discretize(tf: &TransferFunction, dt: f64, delay: f64) -> Result<DiscreteValveModel, PlantError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PlantError::Parameter { field: "dt", reason: format!("{dt} must be positive") });
    }
    if !(delay >= 0.0 && delay.is_finite()) {
        return Err(PlantError::Parameter { field: "delay", reason: format!("{delay} must be non-negative") });
    }
    let lead = tf.den.first().copied().unwrap_or(0.0);
    if tf.den.len() != 4 || lead == 0.0 {
        return Err(PlantError::TransferFunction(
            "denominator must be cubic with a nonzero leading coefficient".into(),
        ));
    }
    if tf.num.len() > 4 || tf.num.is_empty() {
        return Err(PlantError::TransferFunction("numerator must not exceed the denominator degree".into()));
    }
    let a: Vec<f64> = tf.den.iter().map(|c| c / lead).collect();
    let mut b = vec![0.0; 4 - tf.num.len()];
    b.extend(tf.num.iter().map(|c| c / lead));

    let ac = Matrix3::new(-a[1], -a[2], -a[3], 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let bc = Vector3::new(1.0, 0.0, 0.0);
    let cc = Vector3::new(b[1] - a[1] * b[0], b[2] - a[2] * b[0], b[3] - a[3] * b[0]);
    let dc = b[0];

    let eye = Matrix3::identity();
    let lu = (eye - ac * (dt / 2.0)).lu();
    let ad = lu.solve(&(eye + ac * (dt / 2.0))).ok_or_else(|| {
        PlantError::TransferFunction(format!("bilinear map is singular at dt = {dt}"))
    })?;
    let bd = lu.solve(&(bc * dt)).expect("same factorization");
    let cd = (eye - ac * (dt / 2.0))
        .transpose()
        .lu()
        .solve(&cc)
        .expect("transpose of a regular matrix");
    let dd = dc + 0.5 * cc.dot(&bd);

    let radius = ad.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !radius.is_finite() || radius > 1.0 + STABILITY_TOLERANCE {
        return Err(PlantError::Unstable(radius));
    }
    Ok(DiscreteValveModel {
        ad,
        bd,
        cd,
        dd,
        dt,
        x: Vector3::zeros(),
        delay: DelayLine::from_seconds(delay, dt),
    })
}

impl DiscreteValveModel {
    pub fn valve(dt: f64, delay: f64) -> Result<Self, PlantError> {
        discretize(&TransferFunction::valve(), dt, delay)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn delay_len(&self) -> usize {
        self.delay.len()
    }

    pub fn state(&self) -> &Vector3<f64> {
        &self.x
    }

    /// Steady-state gain of the discrete realization.
    pub fn dc_gain(&self) -> f64 {
        let eye = Matrix3::identity();
        match (eye - self.ad).lu().solve(&self.bd) {
            Some(x) => self.cd.dot(&x) + self.dd,
            None => f64::NAN,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.ad.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Advances one sample without output clamping.
    pub fn step_raw(&mut self, commanded: f64) -> f64 {
        let u = self.delay.push(commanded);
        let y = self.cd.dot(&self.x) + self.dd * u;
        self.x = self.ad * self.x + self.bd * u;
        y
    }

    /// Advances one sample; the effective position is clamped to [0, 100].
    pub fn step(&mut self, commanded_pct: f64) -> f64 {
        self.step_raw(commanded_pct).clamp(0.0, 100.0)
    }

    pub fn response(&mut self, inputs: &[f64]) -> Vec<f64> {
        inputs.iter().map(|&u| self.step_raw(u)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_gain_is_preserved() {
        let m = DiscreteValveModel::valve(0.1, 0.5).unwrap();
        let expected = 0.003544 / 0.003547;
        assert!((m.dc_gain() - expected).abs() < 1e-9, "{}", m.dc_gain());
        assert!((TransferFunction::valve().dc_gain() - expected).abs() < 1e-15);
    }

    #[test]
    fn delay_holds_output() {
        let mut m = DiscreteValveModel::valve(0.1, 0.5).unwrap();
        assert_eq!(m.delay_len(), 5);
        for _ in 0..5 {
            assert_eq!(m.step(100.0), 0.0);
        }
        assert!(m.step(100.0) > 0.0);
    }

    #[test]
    fn rejects_unstable_and_malformed() {
        let unstable = TransferFunction { num: vec![1.0], den: vec![1.0, -1.0, 1.0, 1.0] };
        assert!(matches!(discretize(&unstable, 0.1, 0.0), Err(PlantError::Unstable(_))));
        let bad = TransferFunction { num: vec![1.0], den: vec![0.0, 1.0, 1.0, 1.0] };
        assert!(discretize(&bad, 0.1, 0.0).is_err());
        assert!(DiscreteValveModel::valve(0.0, 0.5).is_err());
    }

    #[test]
    fn first_order_lag_embedded_in_cubic() {
        // (s + 2)(s + 3) / ((s + 1)(s + 2)(s + 3)) = 1 / (s + 1)
        let tf = TransferFunction { num: vec![1.0, 5.0, 6.0], den: vec![1.0, 6.0, 11.0, 6.0] };
        let mut m = discretize(&tf, 0.01, 0.0).unwrap();
        let y = m.response(&vec![1.0; 100]);
        // trapezoidal solution of y' = -y + 1 at t = 1 s is close to 1 - e^-1
        assert!((y[99] - (1.0 - (-1.0f64).exp())).abs() < 1e-2);
    }
}
