//! Batch sweep over initial pressure errors, defuzzification methods and
//! noise seeds.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::controller::ControllerConfig;
use crate::error::ScenarioError;
use crate::fuzzy::{DefuzzMethod, RuleBase};
use crate::metrics::{evaluate_series, Direction, MetricsReport};
use crate::plant::{run_closed_loop, PlantConfig, Series};

pub const DEFAULT_SEED: u64 = 42;

/// IPE values from -5 to +5 bar in 0.5 bar steps.
pub fn default_ipe_values() -> Vec<f64> {
    (-10..=10).map(|k| k as f64 * 0.5).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub setpoint: f64,
    pub ipe_values: Vec<f64>,
    pub methods: Vec<DefuzzMethod>,
    pub seeds: Vec<u64>,
    pub plant: PlantConfig,
    pub band_pct: f64,
    /// Keep per-cell trajectories in the report.
    pub keep_series: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            setpoint: 5.0,
            ipe_values: default_ipe_values(),
            methods: DefuzzMethod::ALL.to_vec(),
            seeds: vec![DEFAULT_SEED],
            plant: PlantConfig::default(),
            band_pct: 2.0,
            keep_series: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let err = |m: String| Err(ScenarioError::Config(m));
        if self.ipe_values.is_empty() {
            return err("no IPE values".into());
        }
        if self.methods.is_empty() {
            return err("no methods".into());
        }
        if self.seeds.is_empty() {
            return err("no seeds".into());
        }
        if !(0.0..=10.0).contains(&self.setpoint) || self.setpoint == 0.0 {
            return err(format!("setpoint {} must lie in (0, 10] bar", self.setpoint));
        }
        for &ipe in &self.ipe_values {
            let p0 = self.setpoint - ipe;
            if !(0.0..=10.0).contains(&p0) {
                return err(format!("IPE {ipe} puts the initial pressure at {p0}, outside [0, 10] bar"));
            }
        }
        if self.band_pct != 2.0 && self.band_pct != 5.0 {
            return err(format!("band {} must be 2 or 5", self.band_pct));
        }
        self.plant.validate()?;
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.ipe_values.len() * self.methods.len() * self.seeds.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub method: DefuzzMethod,
    pub ipe: f64,
    pub seed: u64,
    pub metrics: Result<MetricsReport, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
}

/// Seed-mean of each metric for one (method, IPE) pair. Optional timings
/// are averaged over the seeds where they exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub method: DefuzzMethod,
    pub ipe: f64,
    pub runs: usize,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub iae: f64,
    pub ise: f64,
    pub itae: f64,
    pub sse: f64,
    pub rise_time: Option<f64>,
    pub fall_time: Option<f64>,
    pub settling_time: Option<f64>,
    pub settled_runs: usize,
    pub over_under_pct: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    /// Ordered by method, then IPE, then seed.
    pub cells: Vec<Cell>,
    /// Ordered by method, then IPE.
    pub aggregates: Vec<Aggregate>,
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let (s, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    ((n > 0).then(|| s / n as f64), n)
}

pub fn aggregate(method: DefuzzMethod, ipe: f64, reports: &[MetricsReport]) -> Option<Aggregate> {
    let first = reports.first()?;
    let n = reports.len() as f64;
    let avg = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let (settling_time, settled_runs) = mean_opt(reports.iter().map(|r| r.settling_time));
    Some(Aggregate {
        method,
        ipe,
        runs: reports.len(),
        mse: avg(|r| r.mse),
        rmse: avg(|r| r.rmse),
        mae: avg(|r| r.mae),
        iae: avg(|r| r.iae),
        ise: avg(|r| r.ise),
        itae: avg(|r| r.itae),
        sse: avg(|r| r.sse),
        rise_time: mean_opt(reports.iter().map(|r| r.rise_time)).0,
        fall_time: mean_opt(reports.iter().map(|r| r.fall_time)).0,
        settling_time,
        settled_runs,
        over_under_pct: avg(|r| r.over_under_pct),
        direction: first.direction,
    })
}

pub fn run_cell(cfg: &SweepConfig, rules: &RuleBase, method: DefuzzMethod, ipe: f64, seed: u64) -> Cell {
    let plant = PlantConfig { initial_pressure: cfg.setpoint - ipe, ..cfg.plant };
    let result = ControllerConfig::new(cfg.setpoint, method)
        .map_err(|e| e.to_string())
        .and_then(|c| run_closed_loop(&plant, &c, rules, seed).map_err(|e| e.to_string()))
        .and_then(|s| evaluate_series(&s, cfg.band_pct).map(|m| (m, s)).map_err(|e| e.to_string()));
    match result {
        Ok((m, s)) => Cell { method, ipe, seed, metrics: Ok(m), series: cfg.keep_series.then_some(s) },
        Err(e) => Cell { method, ipe, seed, metrics: Err(e), series: None },
    }
}

pub fn run_sweep(cfg: &SweepConfig, rules: &RuleBase) -> Result<SweepReport, ScenarioError> {
    run_sweep_with_progress(cfg, rules, |_, _| {})
}

/// Runs all cells in parallel; `progress(done, total)` is called after each
/// cell from whichever worker finished it.
pub fn run_sweep_with_progress(
    cfg: &SweepConfig,
    rules: &RuleBase,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<SweepReport, ScenarioError> {
    cfg.validate()?;
    let jobs: Vec<(DefuzzMethod, f64, u64)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.ipe_values.iter().flat_map(move |&i| cfg.seeds.iter().map(move |&s| (m, i, s))))
        .collect();
    let total = jobs.len();
    let done = AtomicUsize::new(0);
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(m, i, s)| {
            let c = run_cell(cfg, rules, m, i, s);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
            c
        })
        .collect();
    let aggregates = cells
        .chunks(cfg.seeds.len())
        .filter_map(|group| {
            let ok: Vec<MetricsReport> = group.iter().filter_map(|c| c.metrics.clone().ok()).collect();
            aggregate(group[0].method, group[0].ipe, &ok)
        })
        .collect();
    Ok(SweepReport { config: cfg.clone(), cells, aggregates })
}

impl SweepReport {
    pub fn aggregates_for(&self, method: DefuzzMethod) -> Vec<&Aggregate> {
        self.aggregates.iter().filter(|a| a.method == method).collect()
    }

    pub fn cells_for(&self, method: DefuzzMethod, seed: u64) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.method == method && c.seed == seed).collect()
    }
}

/// Per-method averages across IPE values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: DefuzzMethod,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub iae: f64,
    pub ise: f64,
    pub itae: f64,
    pub sse: f64,
    pub settling_time: Option<f64>,
    pub max_over_under_pct: f64,
    /// Nonzero IPE values where at least one seed never settled.
    pub unsettled_ipes: usize,
    pub never_settles: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub methods: Vec<MethodSummary>,
    /// Metric name to the method with the lowest mean.
    pub best: BTreeMap<String, DefuzzMethod>,
}

pub fn compare_methods(report: &SweepReport) -> Ranking {
    let mut methods = Vec::new();
    for &m in &report.config.methods {
        let aggs = report.aggregates_for(m);
        if aggs.is_empty() {
            continue;
        }
        let n = aggs.len() as f64;
        let avg = |f: fn(&Aggregate) -> f64| aggs.iter().map(|a| f(a)).sum::<f64>() / n;
        let nonzero: Vec<&&Aggregate> = aggs.iter().filter(|a| a.ipe != 0.0).collect();
        let unsettled = nonzero.iter().filter(|a| a.settled_runs < a.runs).count();
        methods.push(MethodSummary {
            method: m,
            mse: avg(|a| a.mse),
            rmse: avg(|a| a.rmse),
            mae: avg(|a| a.mae),
            iae: avg(|a| a.iae),
            ise: avg(|a| a.ise),
            itae: avg(|a| a.itae),
            sse: avg(|a| a.sse),
            settling_time: mean_opt(aggs.iter().map(|a| a.settling_time)).0,
            max_over_under_pct: aggs.iter().map(|a| a.over_under_pct).fold(0.0, f64::max),
            unsettled_ipes: unsettled,
            never_settles: !nonzero.is_empty() && unsettled * 2 > nonzero.len(),
        });
    }
    let mut best = BTreeMap::new();
    let pick: [(&str, fn(&MethodSummary) -> f64); 8] = [
        ("mse", |s| s.mse),
        ("rmse", |s| s.rmse),
        ("mae", |s| s.mae),
        ("iae", |s| s.iae),
        ("ise", |s| s.ise),
        ("itae", |s| s.itae),
        ("sse", |s| s.sse),
        ("over_under_pct", |s| s.max_over_under_pct),
    ];
    for (name, f) in pick {
        if let Some(s) = methods.iter().min_by(|a, b| f(a).total_cmp(&f(b))) {
            best.insert(name.to_string(), s.method);
        }
    }
    Ranking { methods, best }
}
