//! End-to-end runs of the `cvlattice` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cvlattice::output::{read_table, PSI_HEADER_BYTES};

fn cvlattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvlattice"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

const SMALL_GRID: &str = "m_points = 64\nextent = 14.0\nl_trunc = 30\n";

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    fs::write(&path, format!("{SMALL_GRID}output_dir = \"{}\"\n{body}", dir.join("run").display())).unwrap();
    path.display().to_string()
}

#[test]
fn propagator_run_writes_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_sites = 12\ntotal_time = 0.25\nrecord_stride = 10\nwrite_psi = true\n");
    let out = cvlattice(&["propagator", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");

    for (file, header) in [
        ("field.csv", vec!["t", "site", "value"]),
        ("energy.csv", vec!["t", "site", "value"]),
        ("norms.csv", vec!["t", "max_drift"]),
        ("metrics.csv", vec!["name", "value"]),
        ("slice.csv", vec!["t", "field", "propagator"]),
    ] {
        let (h, _) = read_table(&run.join(file)).unwrap();
        assert_eq!(h, header, "{file}");
    }
    // snapshots at steps 0, 10, 20, 25
    let (_, field) = read_table(&run.join("field.csv")).unwrap();
    assert_eq!(field.len(), 4 * 12);
    let echo = fs::read_to_string(run.join("config-echo.toml")).unwrap();
    assert!(echo.contains("experiment = \"propagator\""));
    assert!(echo.contains("n_sites = 12"));

    let psi = fs::read(run.join("psi.raw")).unwrap();
    let header = std::str::from_utf8(&psi[..PSI_HEADER_BYTES]).unwrap();
    assert!(header.starts_with("cvlattice-psi N=12 M=64 snapshots=4"));
    assert_eq!(psi.len(), PSI_HEADER_BYTES + 4 * 12 * 64 * 16);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let cfg = write_config(dir.path(), "n_sites = 10\ncoupling = 0.4\ntotal_time = 0.3\nrecord_stride = 5\n");
            let out = cvlattice(&["propagator", "--config", &cfg, "threads=1"]);
            assert!(out.status.success());
            let run = dir.path().join("run");
            [fs::read(run.join("field.csv")).unwrap(), fs::read(run.join("energy.csv")).unwrap()].concat()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn overrides_take_precedence_over_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_sites = 10\ntotal_time = 0.1\n");
    let out = cvlattice(&["propagator", "--config", &cfg, "n_sites=14"]);
    assert!(out.status.success());
    let (_, rows) = read_table(&dir.path().join("run/field.csv")).unwrap();
    assert_eq!(rows.iter().filter(|r| r[0] == rows[0][0]).count(), 14);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_sites = 10\nlattice_size = 3\n");
    assert_eq!(cvlattice(&["propagator", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "experiment = \"scattering\"\n");
    assert_eq!(cvlattice(&["propagator", "--config", &cfg]).status.code(), Some(2));

    assert_eq!(cvlattice(&["teleport"]).status.code(), Some(2));
    assert_eq!(cvlattice(&["propagator", "dt"]).status.code(), Some(2));
    assert_eq!(cvlattice(&["propagator", "hop=exact"]).status.code(), Some(2));
    assert_eq!(cvlattice(&["propagator", "total_time=0.015"]).status.code(), Some(2));
    assert_eq!(cvlattice(&["propagator", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    let out = cvlattice(&["propagator", "impulse_amplitude=40.0", "total_time=0.0", "n_sites=4"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn zero_time_degenerate_check_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_sites = 4\ntotal_time = 0.0\n");
    let out = cvlattice(&["degenerate-check", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_table(&dir.path().join("run/deviation.csv")).unwrap();
    assert_eq!(header, ["t", "inter_site", "vs_single"]);
    assert!(rows.is_empty());
}

#[test]
fn every_experiment_runs_at_toy_size() {
    let cases = [
        ("single-qumode", "times = [0.0, 0.1]\n"),
        ("scattering", "n_sites = 24\ntotal_time = 0.2\n[[wavepacket]]\ncenter = 6.0\nmomentum = 0.3\nwidth = 0.3\n[[wavepacket]]\ncenter = 18.0\nmomentum = -0.3\nwidth = 0.3\n"),
        ("degenerate-check", "n_sites = 4\ntotal_time = 0.2\n"),
        ("oracle-compare", "fock_cutoff = 4\ntotal_time = 0.1\n"),
    ];
    for (name, body) in cases {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), body);
        let out = cvlattice(&[name, "--config", &cfg]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let (_, metrics) = read_table(&dir.path().join("run/metrics.csv")).unwrap();
        assert!(!metrics.is_empty(), "{name}");
        for row in metrics {
            row[1].parse::<f64>().unwrap();
        }
    }
}
