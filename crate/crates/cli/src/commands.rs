use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use splitfuzz::config::Document;
use splitfuzz::io::{aggregate_csv, dataset_csv, grid_csv, metrics_csv, parse_dataset_csv, series_csv, summary_csv};
use splitfuzz::plot::{pressure_svg, valves_svg};
use splitfuzz::scenario::{compare_methods, run_sweep_with_progress, DEFAULT_SEED};
use splitfuzz::sysid::{generate_valve_data, grid_search};
use splitfuzz::{DefuzzMethod, PlantConfig, SweepConfig};

use crate::args::{PlantArgs, SimulateArgs, SweepArgs, SysidArgs, Toggle};
use crate::run::{run_id, simulate, simulate_file_stem, RunSpec};
use crate::UsageError;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn load_document(path: Option<&Path>) -> Result<Document> {
    let Some(path) = path else {
        return Ok(Document::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn apply_plant(plant: &mut PlantConfig, a: &PlantArgs) {
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut plant.duration, a.duration);
    set(&mut plant.dt, a.dt);
    set(&mut plant.fuel_gain, a.fuel_gain);
    set(&mut plant.outlet_gain, a.outlet_gain);
    set(&mut plant.fuel_flow, a.fuel_flow);
    set(&mut plant.base_outflow, a.base_outflow);
    set(&mut plant.noise_std, a.noise);
    set(&mut plant.delay, a.delay);
    if let Some(t) = a.actuator {
        plant.actuator_dynamics = t == Toggle::On;
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn resolve_simulation(args: &SimulateArgs) -> Result<(RunSpec, splitfuzz::RuleBase)> {
    let doc = load_document(args.common.config.as_deref())?;
    let rules = doc.rule_base().map_err(|e| usage(e.to_string()))?;
    let mut spec = RunSpec::from_document(&doc, args.common.seed.unwrap_or(DEFAULT_SEED));
    apply_plant(&mut spec.plant, &args.plant);
    if let Some(sp) = args.plant.setpoint {
        spec.setpoint = sp;
    }
    if let Some(b) = args.plant.band {
        spec.band_pct = b;
    }
    if let Some(p0) = args.initial {
        spec.plant.initial_pressure = p0;
    }
    if let Some(m) = args.method {
        spec.method = m;
    }
    let errors = spec.validate();
    if !errors.is_empty() {
        return Err(usage(crate::run::describe(&errors)));
    }
    Ok((spec, rules))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let (spec, rules) = resolve_simulation(args)?;
    let out = simulate(&spec, &rules).map_err(usage)?;
    let dir = &args.common.out;
    ensure_dir(dir)?;
    let stem = simulate_file_stem(&out);
    let mut files = vec![
        write(dir, &format!("{stem}.series.csv"), &series_csv(&out.series))?,
        write(dir, &format!("{stem}.metrics.csv"), &metrics_csv(&[(spec.ipe(), out.metrics)]))?,
    ];
    if !args.no_plot {
        let title = format!("{} from {} bar to {} bar", spec.method.title(), spec.plant.initial_pressure, spec.setpoint);
        files.push(write(dir, &format!("{stem}.pressure.svg"), &pressure_svg(&out.series, &title))?);
        files.push(write(dir, &format!("{stem}.valves.svg"), &valves_svg(&out.series, &title))?);
    }
    Ok(files)
}

#[derive(Serialize)]
struct SweepSpec<'a> {
    setpoint: f64,
    ipe_values: &'a [f64],
    methods: &'a [DefuzzMethod],
    seeds: &'a [u64],
    band_pct: f64,
    plant: &'a PlantConfig,
}

pub fn resolve_sweep(args: &SweepArgs) -> Result<(SweepConfig, splitfuzz::RuleBase)> {
    let doc = load_document(args.common.config.as_deref())?;
    let rules = doc.rule_base().map_err(|e| usage(e.to_string()))?;
    let mut cfg = SweepConfig {
        setpoint: args.plant.setpoint.unwrap_or(doc.controller.setpoint),
        band_pct: args.plant.band.unwrap_or(doc.controller.band_pct),
        plant: doc.plant,
        ..SweepConfig::default()
    };
    apply_plant(&mut cfg.plant, &args.plant);
    if let Some(m) = &args.methods {
        cfg.methods = m.clone();
    }
    cfg.seeds = match (&args.seeds, args.common.seed) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => vec![s],
        (None, None) => vec![DEFAULT_SEED],
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok((cfg, rules))
}

pub fn sweep_run_id(cfg: &SweepConfig, rules: &splitfuzz::RuleBase) -> String {
    let spec = SweepSpec {
        setpoint: cfg.setpoint,
        ipe_values: &cfg.ipe_values,
        methods: &cfg.methods,
        seeds: &cfg.seeds,
        band_pct: cfg.band_pct,
        plant: &cfg.plant,
    };
    run_id("sweep", &spec, rules)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<PathBuf>> {
    let (cfg, rules) = resolve_sweep(args)?;
    let quiet = args.quiet;
    let report = run_sweep_with_progress(&cfg, &rules, |done, total| {
        if !quiet {
            let mut err = std::io::stderr().lock();
            let _ = writeln!(err, "[{done}/{total}] cells done");
        }
    })
    .map_err(|e| usage(e.to_string()))?;
    let id = sweep_run_id(&cfg, &rules);
    let dir = &args.common.out;
    ensure_dir(dir)?;
    let mut files = Vec::new();
    for &m in &cfg.methods {
        files.push(write(dir, &format!("sweep-{id}-{m}.csv"), &aggregate_csv(&report.aggregates_for(m)))?);
    }
    for c in report.cells.iter().filter(|c| c.metrics.is_err()) {
        eprintln!("cell {} ipe {} seed {} failed: {}", c.method, c.ipe, c.seed, c.metrics.as_ref().unwrap_err());
    }
    files.push(write(dir, &format!("sweep-{id}-summary.csv"), &summary_csv(&compare_methods(&report)))?);
    Ok(files)
}

#[derive(Serialize)]
struct SysidReport {
    n: usize,
    dt: f64,
    seed: Option<u64>,
    na: usize,
    nb: usize,
    nk: usize,
    misfit_pct: f64,
    fit_pct: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

pub fn cmd_sysid(args: &SysidArgs) -> Result<Vec<PathBuf>> {
    let doc = load_document(args.common.config.as_deref())?;
    let (data, seed) = match &args.data {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            (parse_dataset_csv(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?, None)
        }
        None => {
            let seed = args.common.seed.unwrap_or(DEFAULT_SEED);
            let d = generate_valve_data(args.n, args.dt, seed, &doc.sysid).map_err(|e| usage(e.to_string()))?;
            // Fit what lands on disk so `--data` reruns reproduce the grid.
            let d = parse_dataset_csv(&dataset_csv(&d)).map_err(|e| anyhow::anyhow!(e))?;
            (d, Some(seed))
        }
    };
    if data.len() < 2 * 31 {
        return Err(usage(format!("{} samples are too few for the order grid", data.len())));
    }
    let grid = grid_search(&data).map_err(|e| usage(e.to_string()))?;
    let id = crate::run::short_hash(&format!("sysid:{}:{}", serde_json::to_string(&doc.sysid)?, dataset_csv(&data)));
    let dir = &args.common.out;
    ensure_dir(dir)?;
    let report = SysidReport {
        n: data.len(),
        dt: data.dt,
        seed,
        na: grid.best.na,
        nb: grid.best.nb,
        nk: grid.best.nk,
        misfit_pct: grid.best_misfit_pct,
        fit_pct: 100.0 - grid.best_misfit_pct,
        a: grid.best_model.a.clone(),
        b: grid.best_model.b.clone(),
    };
    Ok(vec![
        write(dir, &format!("sysid-{id}-data.csv"), &dataset_csv(&data))?,
        write(dir, &format!("sysid-{id}-grid.csv"), &grid_csv(&grid))?,
        write(dir, &format!("sysid-{id}-best.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?,
    ])
}
