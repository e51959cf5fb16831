use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::SysIdError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalDataset {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub dt: f64,
}

impl SignalDataset {
    pub fn new(u: Vec<f64>, y: Vec<f64>, dt: f64) -> Result<Self, SysIdError> {
        if u.len() != y.len() {
            return Err(SysIdError::Dataset(format!("u has {} samples, y has {}", u.len(), y.len())));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SysIdError::Dataset(format!("dt {dt} must be positive")));
        }
        let t = (0..u.len()).map(|k| k as f64 * dt).collect();
        Ok(Self { t, u, y, dt })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Samples `[from, to)` with time restarted at zero.
    pub fn slice(&self, from: usize, to: usize) -> Self {
        Self::new(self.u[from..to].to_vec(), self.y[from..to].to_vec(), self.dt).expect("sub-range of a valid set")
    }

    /// First half for estimation, second half for validation.
    pub fn split_half(&self) -> (Self, Self) {
        let mid = self.len() / 2;
        (self.slice(0, mid), self.slice(mid, self.len()))
    }
}

/// Shape of the synthetic valve excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub offset: f64,
    pub sine_amplitude: f64,
    pub sine_period_s: f64,
    pub uniform_amplitude: f64,
    pub step_amplitude: f64,
    pub step_every: usize,
    pub delay_samples: usize,
    pub output_noise_std: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            offset: 0.5,
            sine_amplitude: 0.25,
            sine_period_s: 100.0,
            uniform_amplitude: 0.1,
            step_amplitude: 0.2,
            step_every: 50,
            delay_samples: 1,
            output_noise_std: 0.003,
        }
    }
}

/// Input is a slow sine plus uniform jitter plus random steps; output is the
/// input delayed by `delay_samples` with Gaussian noise. Both are clipped to
/// [0, 1].
pub fn generate_valve_data(n: usize, dt: f64, seed: u64, cfg: &GeneratorConfig) -> Result<SignalDataset, SysIdError> {
    if n < 10 {
        return Err(SysIdError::Dataset(format!("{n} samples requested, need at least 10")));
    }
    if cfg.output_noise_std < 0.0 || !cfg.output_noise_std.is_finite() {
        return Err(SysIdError::Dataset("output noise must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, cfg.output_noise_std).expect("checked above");
    let every = cfg.step_every.max(1);
    let mut level = 0.0;
    let mut u = Vec::with_capacity(n);
    for k in 0..n {
        if k % every == 0 {
            level = rng.random_range(-1.0..=1.0) * cfg.step_amplitude;
        }
        let t = k as f64 * dt;
        let sine = cfg.sine_amplitude * (std::f64::consts::TAU * t / cfg.sine_period_s).sin();
        let jitter = rng.random_range(-1.0..=1.0) * cfg.uniform_amplitude;
        u.push((cfg.offset + sine + level + jitter).clamp(0.0, 1.0));
    }
    let y = (0..n)
        .map(|k| {
            let src = u[k.saturating_sub(cfg.delay_samples)];
            (src + noise.sample(&mut rng)).clamp(0.0, 1.0)
        })
        .collect();
    SignalDataset::new(u, y, dt)
}
