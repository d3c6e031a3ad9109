use std::path::Path;
use std::process::Command;

use starris::cli::{self, Invocation};
use starris::Error;

fn preset(name: &str, overrides: &[&str], trials: Option<u64>) -> Invocation {
    Invocation {
        preset: Some(name.into()),
        overrides: overrides.iter().map(|s| s.to_string()).collect(),
        trials,
        ..Default::default()
    }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn outage_preset_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli::run(&preset("fig4", &[], Some(20_000)), dir.path()).unwrap();
    assert_eq!(out.files.len(), 1);
    let (header, rows) = read_csv(&out.files[0]);
    assert_eq!(header, ["snr_db", "scheme", "engine", "outage_t", "outage_t_se", "outage_r", "outage_r_se"]);
    assert_eq!(rows.len(), 7 * 3 * 2);
    for r in &rows {
        assert_eq!(r.len(), header.len());
        let p: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        // Analytic rows carry no standard error.
        assert_eq!(r[4].is_empty(), r[2] == "analytic");
    }
    let sweeps: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(sweeps.windows(2).all(|w| w[0] <= w[1]));
    assert!(out.manifest.exists());
}

#[test]
fn beta_sweep_preset_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli::run(&preset("fig10", &["experiment.0.engine=\"analytic\""], None), dir.path()).unwrap();
    let (header, rows) = read_csv(&out.files[0]);
    assert_eq!(header[0], "beta_r");
    assert_eq!(rows.len(), 19 * 2);
    assert!(rows.iter().all(|r| r[1] == "TEP" || r[1] == "EEP"));
    let aoi = header.iter().position(|h| h == "aoi").unwrap();
    assert!(rows.iter().all(|r| r[aoi].parse::<f64>().unwrap() >= 1.0));
}

#[test]
fn every_preset_loads() {
    for name in cli::PRESETS {
        let (_, cfg) = cli::load(&preset(name, &[], None)).unwrap();
        assert!(!cfg.experiment.is_empty() || cfg.optimize.is_some(), "{name}");
    }
    assert!(matches!(cli::load(&preset("fig99", &[], None)), Err(Error::Config(_))));
}

#[test]
fn empty_metrics_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("never");
    let err = cli::run(&preset("fig4", &["experiment.0.metrics=[]"], None), &target).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(!target.exists());
}

#[test]
fn optimize_needs_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let mut inv = preset("fig11", &[], None);
    let file = dir.path().join("cfg.toml");
    std::fs::write(&file, "[system]\nsnr_db = 35.0\nrate = 2.0\n[ga]\n[optimize]\nproblems = [\"P1\"]\nelements = [30]\n")
        .unwrap();
    inv.preset = None;
    inv.config = Some(file);
    let err = cli::optimize(&inv, &dir.path().join("out")).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn manifest_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let inv = preset("fig9", &["mc.seed=5", "system.snr_db=32.5"], Some(30_000));
    let out = cli::run(&inv, &first).unwrap();
    let again = dir.path().join("b");
    let replay = Invocation { config: Some(out.manifest.clone()), ..Default::default() };
    let out2 = cli::run(&replay, &again).unwrap();
    assert_eq!(out.files.len(), out2.files.len());
    for (a, b) in out.files.iter().zip(&out2.files) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
    }
    let text = std::fs::read_to_string(&out.manifest).unwrap();
    assert!(text.contains("snr_db = 32.5"));
}

#[test]
fn small_optimize_run() {
    let dir = tempfile::tempdir().unwrap();
    let inv = preset("fig11", &["optimize.elements=[30]", "ga.generations=5", "ga.population=10"], None);
    let out = cli::optimize(&inv, dir.path()).unwrap();
    let (header, rows) = read_csv(&out.files[0]);
    assert_eq!(header[0], "problem");
    assert_eq!(rows.len(), 2);
    let feasible = header.iter().position(|h| h == "feasible").unwrap();
    assert!(rows.iter().all(|r| r[feasible] == "true"));
}

fn bin(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_starris")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn process_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(bin(&["run", "--preset", "fig7", "--out", out]), 0);
    assert_eq!(bin(&["run", "--preset", "fig7", "--set", "system.colour=1", "--out", out]), 2);
    assert_eq!(bin(&["run", "--preset", "fig7", "--set", "policy.tep.alpha_ap=0.9", "--out", out]), 2);
    assert_eq!(bin(&["run", "--preset", "fig7", "--threads", "0", "--out", out]), 2);
    assert_eq!(bin(&["run", "/nonexistent/config.toml", "--out", out]), 4);
    assert_eq!(bin(&["run", "--preset", "fig7", "--out", "/proc/starris"]), 4);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[system\n").unwrap();
    assert_eq!(bin(&["run", bad.to_str().unwrap(), "--out", out]), 2);
}
