use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splitfuzz::plant::{pressure_step, TransferFunction};
use splitfuzz::{
    compute_error, control_step, convert_units, default_rule_base, run_closed_loop, ControllerConfig,
    DefuzzMethod, DiscreteValveModel, PlantConfig, PlantState,
};

/// Rectangle-rule centroid and first-half-mass bisector of a sampled curve.
fn oracle(mu: impl Fn(f64) -> f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..1001).map(|i| i as f64 * 0.1).collect();
    let m: Vec<f64> = xs.iter().map(|&x| mu(x)).collect();
    let total: f64 = m.iter().sum();
    let centroid = xs.iter().zip(&m).map(|(x, m)| x * m).sum::<f64>() / total;
    let mut acc = 0.0;
    let mut bisector = xs[0];
    for (x, m) in xs.iter().zip(&m) {
        acc += m;
        if acc >= total / 2.0 {
            bisector = *x;
            break;
        }
    }
    (centroid, bisector)
}

#[test]
fn error_examples() {
    assert_eq!(compute_error(5.0, 5.0), 0.0);
    assert_abs_diff_eq!(compute_error(5.0, 9.5), -4.5, epsilon = 1e-12);
    assert_eq!(compute_error(5.0, 12.0), -5.0);
    assert_eq!(compute_error(5.0, -3.0), 5.0);
}

#[test]
fn unit_conversion_examples() {
    assert_abs_diff_eq!(convert_units(500.0).unwrap(), 5.0, epsilon = 1e-12);
    assert_eq!(convert_units(0.0).unwrap(), 0.0);
    assert_abs_diff_eq!(convert_units(224.5).unwrap(), 2.245, epsilon = 1e-12);
    assert!(convert_units(-1.0).is_err());
}

#[test]
fn saturated_errors_drive_the_valves_to_the_extremes() {
    let rb = default_rule_base();
    let cfg = ControllerConfig::new(5.0, DefuzzMethod::Centroid).unwrap();
    let up = control_step(&cfg, 0.0, &rb).unwrap();
    assert!(up.fuel_pct > 90.0 && up.outlet_pct < 10.0, "{up:?}");
    let down = control_step(&cfg, 10.0, &rb).unwrap();
    assert!(down.fuel_pct < 10.0 && down.outlet_pct > 90.0, "{down:?}");
}

#[test]
fn zero_error_commands_match_the_consequent_oracle() {
    let rb = default_rule_base();
    let fully_closed = |x: f64| ((25.0 - x) / 25.0).clamp(0.0, 1.0);
    let mostly_closed = |x: f64| (x / 25.0).min((50.0 - x) / 25.0).clamp(0.0, 1.0);
    let (fc_centroid, fc_bisector) = oracle(fully_closed);
    let (mc_centroid, mc_bisector) = oracle(mostly_closed);

    // Frozen from the oracle above.
    assert_abs_diff_eq!(fc_centroid, 8.3, epsilon = 1e-9);
    assert_abs_diff_eq!(fc_bisector, 7.3, epsilon = 1e-9);
    assert_abs_diff_eq!(mc_centroid, 25.0, epsilon = 1e-9);
    assert_abs_diff_eq!(mc_bisector, 25.0, epsilon = 1e-9);

    let expect = |m: DefuzzMethod| match m {
        DefuzzMethod::Centroid => (fc_centroid, mc_centroid),
        DefuzzMethod::Bisector => (fc_bisector, mc_bisector),
        _ => (0.0, 25.0),
    };
    for m in DefuzzMethod::ALL {
        let cfg = ControllerConfig::new(5.0, m).unwrap();
        let cmd = control_step(&cfg, 5.0, &rb).unwrap();
        let (fuel, outlet) = expect(m);
        assert_abs_diff_eq!(cmd.fuel_pct, fuel, epsilon = 1e-9);
        assert_abs_diff_eq!(cmd.outlet_pct, outlet, epsilon = 1e-9);
    }
}

#[test]
fn setpoint_outside_the_range_is_rejected() {
    assert!(ControllerConfig::new(-0.1, DefuzzMethod::Centroid).is_err());
    assert!(ControllerConfig::new(10.5, DefuzzMethod::Centroid).is_err());
}

#[test]
fn valve_dc_gain_and_step_limit() {
    let dc = TransferFunction::valve().dc_gain();
    assert_abs_diff_eq!(dc, 0.003544 / 0.003547, epsilon = 1e-12);
    assert_abs_diff_eq!(dc, 0.99915, epsilon = 1e-5);

    let mut valve = DiscreteValveModel::valve(0.1, 0.0).unwrap();
    assert_abs_diff_eq!(valve.dc_gain(), dc, epsilon = 1e-9);
    let y = valve.response(&vec![50.0; 200]);
    assert!(y.iter().all(|v| v.is_finite()));
}

#[test]
fn zero_input_gives_zero_output() {
    let mut valve = DiscreteValveModel::valve(0.1, 0.5).unwrap();
    assert!(valve.response(&vec![0.0; 500]).iter().all(|&y| y == 0.0));
}

#[test]
fn delay_holds_the_output_for_the_dead_time() {
    let mut valve = DiscreteValveModel::valve(0.1, 0.5).unwrap();
    assert_eq!(valve.delay_len(), 5);
    let y = valve.response(&vec![100.0; 10]);
    assert!(y[..5].iter().all(|&v| v == 0.0), "{y:?}");
    assert!(y[5] != 0.0);
}

#[test]
fn unstable_or_malformed_models_are_rejected() {
    let unstable = TransferFunction { num: vec![1.0], den: vec![1.0, -1.0, 1.0, 1.0] };
    assert!(splitfuzz::plant::discretize(&unstable, 0.1, 0.0).is_err());
    let improper = TransferFunction { num: vec![1.0, 0.0, 0.0, 0.0, 0.0], den: vec![1.0, 1.0, 1.0, 1.0] };
    assert!(splitfuzz::plant::discretize(&improper, 0.1, 0.0).is_err());
    assert!(DiscreteValveModel::valve(0.0, 0.0).is_err());
}

fn quiet(cfg: PlantConfig) -> PlantConfig {
    PlantConfig { noise_std: 0.0, ..cfg }
}

#[test]
fn closed_valves_hold_pressure_when_base_flows_cancel() {
    let cfg = quiet(PlantConfig { fuel_flow: 0.1, base_outflow: 0.1, ..PlantConfig::default() });
    let mut s = PlantState::initial(&cfg);
    for _ in 0..250 {
        s = pressure_step(&cfg, &s, 0.0, 0.0, 0.0);
    }
    assert_abs_diff_eq!(s.pressure_true, cfg.initial_pressure, epsilon = 1e-12);
}

#[test]
fn full_fuel_ramp_is_euler_exact() {
    // Inflow rate fuel_gain * (fuel_flow + 1) = 0.2 bar/s with no outflow.
    let cfg = quiet(PlantConfig {
        fuel_gain: 0.1,
        fuel_flow: 1.0,
        base_outflow: 0.0,
        initial_pressure: 1.0,
        dt: 0.1,
        ..PlantConfig::default()
    });
    let mut s = PlantState::initial(&cfg);
    for _ in 0..100 {
        s = pressure_step(&cfg, &s, 100.0, 0.0, 0.0);
    }
    assert_abs_diff_eq!(s.pressure_true - 1.0, 2.0, epsilon = 1e-9);
    assert_abs_diff_eq!(s.t, 10.0, epsilon = 1e-9);
}

#[test]
fn measurement_noise_has_the_configured_spread() {
    let cfg = PlantConfig::default();
    let dist = rand_distr::Normal::new(0.0, cfg.noise_std).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = PlantState::initial(&cfg);
    let mut diffs = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        s = pressure_step(&cfg, &s, 7.8, 25.0, rng.sample(dist));
        diffs.push(s.pressure_measured - s.pressure_true);
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
    assert_abs_diff_eq!(var.sqrt(), 0.005, epsilon = 2e-4);
}

#[test]
fn pressure_never_goes_negative() {
    let cfg = quiet(PlantConfig { initial_pressure: 0.2, ..PlantConfig::default() });
    let mut s = PlantState::initial(&cfg);
    for _ in 0..100 {
        s = pressure_step(&cfg, &s, 0.0, 100.0, 0.0);
        assert!(s.pressure_true >= 0.0);
    }
    assert_eq!(s.pressure_true, 0.0);
}

#[test]
fn fixed_point_start_stays_put() {
    let rb = default_rule_base();
    let plant = quiet(PlantConfig::default());
    let ctrl = ControllerConfig::new(5.0, DefuzzMethod::Centroid).unwrap();
    let series = run_closed_loop(&plant, &ctrl, &rb, 1).unwrap();
    // Valves sit closed until the first command clears the dead time.
    let cold_start_drift = plant.delay * plant.rate(0.0, 0.0);
    let worst = series.pressure.iter().map(|p| (p - 5.0).abs()).fold(0.0, f64::max);
    assert!(worst <= cold_start_drift + 1e-3, "max deviation {worst}, bound {cold_start_drift}");
    let tail = &series.pressure[series.len() / 2..];
    assert!(tail.iter().all(|p| (p - 5.0).abs() < 0.02), "{tail:?}");
}

#[test]
fn far_start_settles_with_centroid() {
    let rb = default_rule_base();
    let plant = PlantConfig { initial_pressure: 9.53, ..PlantConfig::default() };
    let ctrl = ControllerConfig::new(5.0, DefuzzMethod::Centroid).unwrap();
    let series = run_closed_loop(&plant, &ctrl, &rb, 42).unwrap();
    let m = splitfuzz::metrics::evaluate_series(&series, 2.0).unwrap();
    assert!(m.settling_time.is_some_and(|t| t <= 15.0), "{m:?}");
    assert!(series.pressure[0] > 9.0);
}

#[test]
fn same_seed_same_series() {
    let rb = default_rule_base();
    let plant = PlantConfig { initial_pressure: 7.0, actuator_dynamics: true, ..PlantConfig::default() };
    let ctrl = ControllerConfig::new(5.0, DefuzzMethod::Bisector).unwrap();
    let a = run_closed_loop(&plant, &ctrl, &rb, 9).unwrap();
    let b = run_closed_loop(&plant, &ctrl, &rb, 9).unwrap();
    let c = run_closed_loop(&plant, &ctrl, &rb, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.pressure, c.pressure);
    assert_eq!(a.len(), plant.steps());
}

#[test]
fn series_columns_have_equal_length() {
    let rb = default_rule_base();
    let plant = PlantConfig { actuator_dynamics: true, ..PlantConfig::default() };
    let ctrl = ControllerConfig::new(5.0, DefuzzMethod::Som).unwrap();
    let s = run_closed_loop(&plant, &ctrl, &rb, 0).unwrap();
    for col in [&s.pressure, &s.fuel_cmd, &s.outlet_cmd, &s.fuel_eff, &s.outlet_eff] {
        assert_eq!(col.len(), s.t.len());
    }
    assert_eq!(s.t[0], 0.0);
}

#[test]
fn extreme_errors_land_in_the_closed_shoulder() {
    let rb = default_rule_base();
    let fully_closed_support = 0.0..25.0;
    for m in DefuzzMethod::ALL {
        let cfg = ControllerConfig::new(5.0, m).unwrap();
        let up = control_step(&cfg, 0.0, &rb).unwrap();
        let down = control_step(&cfg, 10.0, &rb).unwrap();
        match m {
            DefuzzMethod::Centroid | DefuzzMethod::Bisector => {
                assert!(fully_closed_support.contains(&up.outlet_pct), "{m}: {up:?}");
                assert!(fully_closed_support.contains(&down.fuel_pct), "{m}: {down:?}");
            }
            _ => {
                assert_eq!(up.outlet_pct, 0.0, "{m}");
                assert_eq!(down.fuel_pct, 0.0, "{m}");
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_commands() {
    let rb = default_rule_base();
    for m in DefuzzMethod::ALL {
        let cfg = ControllerConfig::new(5.0, m).unwrap();
        for p in [0.3, 4.99, 5.0, 7.77] {
            let a = control_step(&cfg, p, &rb).unwrap();
            let b = control_step(&cfg, p, &rb).unwrap();
            assert_eq!(a.fuel_pct.to_bits(), b.fuel_pct.to_bits());
            assert_eq!(a.outlet_pct.to_bits(), b.outlet_pct.to_bits());
        }
    }
}
