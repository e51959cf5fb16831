use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use splitfuzz::io::{GRID_HEADER, METRICS_HEADER, SERIES_HEADER};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_splitfuzz"));
    c.env_remove(splitfuzz_cli::OUT_DIR_ENV);
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn written(o: &Output) -> Vec<PathBuf> {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap().lines().map(PathBuf::from).collect()
}

fn names(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_writes_series_metrics_and_plots() {
    let dir = TempDir::new().unwrap();
    let o = run(&["simulate", "--setpoint", "5", "--initial", "9.53", "--method", "centroid"], dir.path());
    let files = written(&o);
    let names = names(&files);
    assert_eq!(names.len(), 4);
    for suffix in [".series.csv", ".metrics.csv", ".pressure.svg", ".valves.svg"] {
        assert!(names.iter().any(|n| n.starts_with("simulate-centroid-") && n.ends_with(suffix)), "{names:?}");
    }
    let series = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(series.lines().next().unwrap(), SERIES_HEADER);
    assert_eq!(series.lines().count(), 251);
    let metrics = fs::read_to_string(&files[1]).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next().unwrap(), METRICS_HEADER);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "-4.530000");
    let settle: f64 = row[10].parse().unwrap();
    assert!(settle <= 15.0);
    assert!(fs::read_to_string(&files[2]).unwrap().starts_with("<svg"));
}

#[test]
fn no_plot_skips_the_svg_files() {
    let dir = TempDir::new().unwrap();
    let files = written(&run(&["simulate", "--no-plot"], dir.path()));
    assert_eq!(files.len(), 2);
}

#[test]
fn unknown_method_exits_with_usage_status() {
    let dir = TempDir::new().unwrap();
    let o = run(&["simulate", "--method", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for m in ["centroid", "bisector", "mom", "lom", "som"] {
        assert!(err.contains(m), "{err}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn invalid_values_exit_with_usage_status() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["simulate", "--setpoint", "0"][..],
        &["simulate", "--initial", "12"],
        &["simulate", "--noise", "-0.1"],
        &["simulate", "--band", "3"],
        &["simulate", "--dt", "0"],
        &["simulate", "--actuator", "maybe"],
        &["sweep", "--methods", "centroid,median"],
        &["sweep", "--setpoint", "8"],
        &["sysid", "--n", "20"],
    ] {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn fixed_point_run_reports_small_error() {
    let dir = TempDir::new().unwrap();
    let files = written(&run(&["simulate", "--setpoint", "5", "--initial", "5", "--noise", "0", "--no-plot"], dir.path()));
    let metrics = fs::read_to_string(&files[1]).unwrap();
    let mse: f64 = metrics.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    // Bounded by the drift while the valves wait out the dead time.
    assert!(mse < 2e-3, "{mse}");
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["simulate", "--initial", "3.2", "--method", "bisector", "--seed", "7", "--actuator", "on"];
    let fa = written(&run(&args, a.path()));
    let fb = written(&run(&args, b.path()));
    assert_eq!(names(&fa), names(&fb));
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn changed_inputs_change_the_run_id() {
    let dir = TempDir::new().unwrap();
    let a = names(&written(&run(&["simulate", "--seed", "1", "--no-plot"], dir.path())));
    let b = names(&written(&run(&["simulate", "--seed", "2", "--no-plot"], dir.path())));
    assert_ne!(a[0], b[0]);
}

#[test]
fn default_sweep_writes_five_tables_and_a_summary() {
    let dir = TempDir::new().unwrap();
    let o = run(&["sweep"], dir.path());
    let files = names(&written(&o));
    assert_eq!(files.len(), 6);
    for m in ["lom", "som", "mom", "bisector", "centroid", "summary"] {
        assert!(files.iter().any(|n| n.ends_with(&format!("-{m}.csv"))), "{files:?}");
    }
    assert!(stderr(&o).contains("[105/105]"));
    let table = fs::read_to_string(dir.path().join(&files[4])).unwrap();
    assert_eq!(table.lines().count(), 22);
}

#[test]
fn method_subset_writes_only_those_tables() {
    let dir = TempDir::new().unwrap();
    let files = names(&written(&run(&["sweep", "--methods", "centroid,bisector", "--quiet"], dir.path())));
    assert_eq!(files.len(), 3);
    assert!(files[0].ends_with("-centroid.csv") && files[1].ends_with("-bisector.csv"));
    assert!(files[2].ends_with("-summary.csv"));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["sweep", "--seed", "7", "--quiet"];
    let fa = written(&run(&args, a.path()));
    let fb = written(&run(&args, b.path()));
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn sysid_writes_the_full_grid() {
    let dir = TempDir::new().unwrap();
    let files = written(&run(&["sysid", "--n", "1000", "--dt", "0.5"], dir.path()));
    assert_eq!(files.len(), 3);
    let data = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(data.lines().count(), 1001);
    let last_t: f64 = data.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(last_t + 0.5, 500.0);
    let grid = fs::read_to_string(&files[1]).unwrap();
    assert_eq!(grid.lines().next().unwrap(), GRID_HEADER);
    assert_eq!(grid.lines().count(), 1001);
    let best: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[2]).unwrap()).unwrap();
    assert!(best["fit_pct"].as_f64().unwrap() >= 95.0, "{best}");
}

#[test]
fn sysid_reads_an_existing_dataset() {
    let dir = TempDir::new().unwrap();
    let generated = written(&run(&["sysid", "--n", "300", "--seed", "3"], dir.path()));
    let again = TempDir::new().unwrap();
    let data = generated[0].to_string_lossy().into_owned();
    let read = written(&run(&["sysid", "--data", &data], again.path()));
    assert_eq!(fs::read(&generated[1]).unwrap(), fs::read(&read[1]).unwrap());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let o = bin()
        .args(["simulate", "--no-plot"])
        .env(splitfuzz_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn config_file_overrides_defaults_and_flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[controller]\nmethod = \"som\"\n[plant]\nnoise_std = 0.0\n").unwrap();
    let cfg = cfg.to_string_lossy().into_owned();
    let from_file = names(&written(&run(&["simulate", "--config", &cfg, "--no-plot"], dir.path())));
    assert!(from_file[0].starts_with("simulate-som-"));
    let flagged = names(&written(&run(&["simulate", "--config", &cfg, "--method", "lom", "--no-plot"], dir.path())));
    assert!(flagged[0].starts_with("simulate-lom-"));
}

#[test]
fn serve_rejects_a_bad_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[controller\nsetpoint = ").unwrap();
    let o = bin().args(["serve", "--port", "0", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn serve_binds_an_ephemeral_port_and_stops_on_sigterm() {
    let mut child = bin().args(["serve", "--port", "0"]).stdout(Stdio::piped()).spawn().unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let addr = first.strip_prefix("listening on http://").expect(&first).to_string();
    let port: u16 = addr.rsplit(':').next().unwrap().parse().unwrap();
    assert_ne!(port, 0);

    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(stream, "GET /api/methods HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("centroid"));

    let status = Command::new("kill").args(["-TERM", &child.id().to_string()]).status().unwrap();
    assert!(status.success());
    assert!(child.wait().unwrap().success());
}
