//! Experiment runner behind the `starris` binary: sweeps, figure presets,
//! CSV output and a reproducible run manifest.

pub mod config;
mod presets;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::analytics::{evaluate, PerfReport};
use crate::channel::QuadratureRule;
use crate::error::{Error, Result};
use crate::montecarlo::{mc_batch, McConfig, McCounts};
use crate::optimizer::{assess, baseline, ga_run, Allocation, Problem};
use crate::system::{Policy, Scheme, SystemConfig, TdmaPolicy};

pub use config::{Engine, ExperimentSpec, Metric, RunConfig, SweepVariable};
pub use presets::{preset, PRESETS};

/// Crate version recorded in manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the configuration comes from and what to override.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Reads the preset and/or file, applies overrides, and validates.
/// Returns the resolved table alongside the typed view of it.
pub fn load(inv: &Invocation) -> Result<(toml::Table, RunConfig)> {
    let mut table = match &inv.preset {
        Some(name) => config::parse_table(
            preset(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`; known: {}", PRESETS.join(", "))))?,
        )?,
        None => toml::Table::new(),
    };
    match &inv.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_err(p))?;
            config::merge(&mut table, config::parse_table(&text)?);
        }
        None if inv.preset.is_none() => return Err(Error::Config("give a config file or --preset".into())),
        None => {}
    }
    table.remove("manifest");
    config::apply_overrides(&mut table, &inv.overrides)?;
    if let Some(seed) = inv.seed {
        force_everywhere(&mut table, "seed", toml::Value::Integer(seed as i64))?;
    }
    if let Some(trials) = inv.trials {
        force_everywhere(&mut table, "trials", toml::Value::Integer(trials as i64))?;
    }
    let cfg = RunConfig::from_table(table.clone())?;
    Ok((table, cfg))
}

/// `--seed`/`--trials` win over every per-section and per-experiment value.
fn force_everywhere(table: &mut toml::Table, key: &str, v: toml::Value) -> Result<()> {
    config::set_path(table, &format!("mc.{key}"), v.clone())?;
    if key == "seed" && table.contains_key("ga") {
        config::set_path(table, "ga.seed", v.clone())?;
    }
    if let Some(toml::Value::Array(exps)) = table.get_mut("experiment") {
        for e in exps.iter_mut().filter_map(|e| e.as_table_mut()) {
            e.remove(key);
        }
    }
    Ok(())
}

/// Base configuration with one experiment's `set` table applied.
fn resolve_experiment(root: &toml::Table, e: &ExperimentSpec) -> Result<RunConfig> {
    let mut t = root.clone();
    t.remove("experiment");
    t.remove("optimize");
    for (k, v) in &e.set {
        if k.contains('.') {
            config::set_path(&mut t, k, v.clone())?;
        } else if let toml::Value::Table(sub) = v {
            let mut over = toml::Table::new();
            over.insert(k.clone(), toml::Value::Table(sub.clone()));
            config::merge(&mut t, over);
        } else {
            t.insert(k.clone(), v.clone());
        }
    }
    RunConfig::from_table(t).map_err(|err| Error::Config(format!("experiment `{}`: {err}", e.name)))
}

fn engine_name(montecarlo: bool) -> &'static str {
    if montecarlo {
        "montecarlo"
    } else {
        "analytic"
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep: f64,
    pub scheme: Scheme,
    pub montecarlo: bool,
    /// Per metric: value and, for Monte Carlo, its standard error.
    pub values: Vec<(f64, Option<f64>)>,
}

struct Prepared {
    spec: ExperimentSpec,
    quad: QuadratureRule,
    mc: McConfig,
    points: Vec<(f64, Scheme, SystemConfig, Policy)>,
}

/// Applies a sweep value to the base system and the scheme's policy.
pub fn point(
    var: SweepVariable,
    x: f64,
    system: &SystemConfig,
    cfg: &RunConfig,
    scheme: Scheme,
) -> Result<(SystemConfig, Policy)> {
    let mut sys = *system;
    let (mut tep, mut eep, mut tdma) = (cfg.policy.tep, cfg.policy.eep, cfg.policy.tdma);
    match var {
        SweepVariable::SnrDb => sys = sys.with_snr_db(x),
        SweepVariable::Elements => sys = sys.with_elements(x as u32),
        SweepVariable::Rate => sys = sys.with_rate(x),
        SweepVariable::Alpha => {
            let side = 0.5 * (1.0 - x);
            tep = crate::system::TepPolicy { alpha_t: side, alpha_r: side, alpha_ap: x, ..tep };
            eep = crate::system::EepPolicy { alpha_et: 1.0 - x, alpha_it: x, ..eep };
            tdma = TdmaPolicy::symmetric(x);
        }
        SweepVariable::BetaR => {
            tep = crate::system::TepPolicy { beta_r: x, beta_t: 1.0 - x, ..tep };
            eep = crate::system::EepPolicy { beta_r: x, beta_t: 1.0 - x, ..eep };
        }
    }
    let policy = match scheme {
        Scheme::Tep => Policy::Tep(tep),
        Scheme::Eep => Policy::Eep(eep),
        Scheme::Tdma => Policy::Tdma(tdma),
    };
    sys.validate()?;
    policy.validate()?;
    Ok((sys, policy))
}

fn prepare(root: &toml::Table, e: &ExperimentSpec) -> Result<Prepared> {
    let cfg = resolve_experiment(root, e)?;
    let system = cfg.system.to_config()?;
    let mut points = Vec::new();
    for x in e.sweep.grid()? {
        for &s in &e.schemes {
            let (c, p) = point(e.sweep.variable, x, &system, &cfg, s)
                .map_err(|err| Error::Config(format!("experiment `{}` at {} = {x}: {err}", e.name, e.sweep.variable.column())))?;
            points.push((x, s, c, p));
        }
    }
    Ok(Prepared { spec: e.clone(), quad: cfg.quadrature.rule()?, mc: cfg.mc_for(e), points })
}

fn analytic_values(r: &PerfReport, metrics: &[Metric]) -> Vec<(f64, Option<f64>)> {
    metrics
        .iter()
        .map(|m| {
            let v = match m {
                Metric::OutageT => r.p_out_t,
                Metric::OutageR => r.p_out_r,
                Metric::ThroughputT => r.throughput_t,
                Metric::ThroughputR => r.throughput_r,
                Metric::SumThroughput => r.sum_throughput,
                Metric::Phi => r.success_prob,
                Metric::Aoi => r.avg_aoi,
            };
            (v, None)
        })
        .collect()
}

/// Metric estimates and standard errors from raw counts.
pub fn mc_values(k: &McCounts, rate: f64, policy: &Policy, metrics: &[Metric]) -> Vec<(f64, Option<f64>)> {
    let n = k.trials as f64;
    let o = k.outage();
    let s = k.success();
    let (tau_t, tau_r) = policy.uplink_fractions();
    let (qt, qr) = (1.0 - o.p_t, 1.0 - o.p_r);
    metrics
        .iter()
        .map(|m| match m {
            Metric::OutageT => (o.p_t, Some(o.se_t)),
            Metric::OutageR => (o.p_r, Some(o.se_r)),
            Metric::ThroughputT => (rate * tau_t * qt, Some(rate * tau_t * o.se_t)),
            Metric::ThroughputR => (rate * tau_r * qr, Some(rate * tau_r * o.se_r)),
            Metric::SumThroughput => {
                let var = tau_t * tau_t * qt * (1.0 - qt)
                    + tau_r * tau_r * qr * (1.0 - qr)
                    + 2.0 * tau_t * tau_r * (s.phi - qt * qr);
                (rate * (tau_t * qt + tau_r * qr), Some(rate * (var.max(0.0) / n).sqrt()))
            }
            Metric::Phi => (s.phi, Some(s.se)),
            Metric::Aoi => {
                if s.phi > 0.0 {
                    (1.0 / s.phi, Some(s.se / (s.phi * s.phi)))
                } else {
                    (f64::INFINITY, None)
                }
            }
        })
        .collect()
}

fn compute(p: &Prepared) -> Result<Vec<Row>> {
    let e = &p.spec;
    let mut rows = Vec::new();
    if matches!(e.engine, Engine::Analytic | Engine::Both) {
        let reports = p
            .points
            .par_iter()
            .map(|(_, _, c, pol)| evaluate(c, pol, &p.quad))
            .collect::<Result<Vec<_>>>()?;
        for ((x, s, _, _), r) in p.points.iter().zip(&reports) {
            rows.push(Row { sweep: *x, scheme: *s, montecarlo: false, values: analytic_values(r, &e.metrics) });
        }
    }
    if matches!(e.engine, Engine::Montecarlo | Engine::Both) {
        // One shared gain stream per element count.
        let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
        for (i, (_, _, c, _)) in p.points.iter().enumerate() {
            match groups.iter_mut().find(|(n, _)| *n == c.elements) {
                Some((_, idx)) => idx.push(i),
                None => groups.push((c.elements, vec![i])),
            }
        }
        for (_, idx) in groups {
            let batch: Vec<(SystemConfig, Policy)> = idx.iter().map(|&i| (p.points[i].2, p.points[i].3)).collect();
            let counts = mc_batch(&batch[0].0, &batch, &p.mc)?;
            for (&i, k) in idx.iter().zip(&counts) {
                let (x, s, c, pol) = &p.points[i];
                rows.push(Row { sweep: *x, scheme: *s, montecarlo: true, values: mc_values(k, c.rate, pol, &e.metrics) });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.sweep.total_cmp(&b.sweep).then(a.scheme.cmp(&b.scheme)).then(a.montecarlo.cmp(&b.montecarlo))
    });
    Ok(rows)
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    Error::Io { path: path.display().to_string(), source }
}

fn experiment_table(e: &ExperimentSpec, rows: &[Row]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec![e.sweep.variable.column().to_string(), "scheme".into(), "engine".into()];
    for m in &e.metrics {
        header.push(m.column().into());
        header.push(format!("{}_se", m.column()));
    }
    let body = rows
        .iter()
        .map(|r| {
            let mut line = vec![fmt_f64(r.sweep), r.scheme.name().into(), engine_name(r.montecarlo).into()];
            for (v, se) in &r.values {
                line.push(fmt_f64(*v));
                line.push(se.map(fmt_f64).unwrap_or_default());
            }
            line
        })
        .collect();
    (header, body)
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn write_manifest(
    out_dir: &Path,
    cfg: &RunConfig,
    command: &str,
    entries: Vec<(String, toml::Table)>,
) -> Result<PathBuf> {
    let mut m = toml::Table::new();
    m.insert("version".into(), VERSION.into());
    m.insert("command".into(), command.into());
    let mut runs = toml::Table::new();
    for (name, t) in entries {
        runs.insert(name, toml::Value::Table(t));
    }
    m.insert("runs".into(), toml::Value::Table(runs));
    let mut snapshot = cfg.clone();
    snapshot.manifest = Some(m);
    let text = toml::to_string(&snapshot).map_err(|e| Error::Config(e.to_string()))?;
    let path = out_dir.join("manifest.toml");
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn ensure_dir(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))
}

/// Runs every `[[experiment]]`, writing one CSV each plus `manifest.toml`.
/// All experiments are validated before anything is computed or written.
pub fn run(inv: &Invocation, out_dir: &Path) -> Result<RunOutput> {
    let (table, cfg) = load(inv)?;
    if cfg.experiment.is_empty() {
        return Err(Error::Config("no [[experiment]] entries to run".into()));
    }
    let prepared = cfg.experiment.iter().map(|e| prepare(&table, e)).collect::<Result<Vec<_>>>()?;
    let mut results = Vec::new();
    for p in &prepared {
        let t0 = Instant::now();
        let rows = compute(p)?;
        results.push((p, rows, t0.elapsed().as_secs_f64()));
    }
    ensure_dir(out_dir)?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (p, rows, secs) in results {
        let path = out_dir.join(p.spec.file_name());
        let (h, body) = experiment_table(&p.spec, &rows);
        write_csv(&path, &h, &body)?;
        let mut t = toml::Table::new();
        t.insert("file".into(), p.spec.file_name().into());
        t.insert("mc_seed".into(), toml::Value::Integer(p.mc.seed as i64));
        t.insert("mc_trials".into(), toml::Value::Integer(p.mc.trials as i64));
        t.insert("wall_clock_s".into(), secs.into());
        entries.push((p.spec.name.clone(), t));
        files.push(path);
    }
    let manifest = write_manifest(out_dir, &cfg, "run", entries)?;
    Ok(RunOutput { files, manifest })
}

/// One optimizer result row.
#[derive(Debug, Clone)]
pub struct OptimizeRow {
    pub problem: Problem,
    pub elements: u32,
    pub result: crate::optimizer::GaResult,
    pub baseline_sum_throughput: f64,
    pub baseline_aoi: f64,
}

fn split_columns(a: &Allocation) -> [Option<f64>; 5] {
    match a.policy() {
        Policy::Tep(p) => [Some(p.alpha_t), Some(p.alpha_r), Some(p.alpha_ap), None, Some(p.beta_r)],
        Policy::Eep(p) => [None, None, None, Some(p.alpha_et), Some(p.beta_r)],
        Policy::Tdma(_) => [None; 5],
    }
}

/// GA-TAPA at every `[optimize]` element count, against the fixed baseline.
pub fn optimize_rows(cfg: &RunConfig) -> Result<Vec<OptimizeRow>> {
    let spec = cfg.optimize.as_ref().ok_or_else(|| Error::Config("no [optimize] section".into()))?;
    let ga = cfg.ga.ok_or_else(|| Error::Config("no [ga] section".into()))?;
    let th = spec.threshold()?;
    if spec.elements.is_empty() || spec.elements.contains(&0) {
        return Err(Error::Config("optimize.elements must list positive element counts".into()));
    }
    if spec.problems.is_empty() {
        return Err(Error::Config("optimize.problems is empty".into()));
    }
    let quad = cfg.quadrature.rule()?;
    let base = cfg.system.to_config()?;
    let mut rows = Vec::new();
    for &problem in &spec.problems {
        for &n in &spec.elements {
            let c = base.with_elements(n);
            let result = ga_run(problem, &c, th, &ga, &quad)?;
            let b = assess(&baseline(problem), &c, th, ga.penalty, &quad)?;
            rows.push(OptimizeRow { problem, elements: n, result, baseline_sum_throughput: b.sum_throughput, baseline_aoi: b.aoi });
        }
    }
    Ok(rows)
}

/// Runs [`optimize_rows`] and writes its CSV plus `manifest.toml`.
pub fn optimize(inv: &Invocation, out_dir: &Path) -> Result<RunOutput> {
    let (_, cfg) = load(inv)?;
    let t0 = Instant::now();
    let rows = optimize_rows(&cfg)?;
    let secs = t0.elapsed().as_secs_f64();
    let spec = cfg.optimize.as_ref().expect("checked");
    ensure_dir(out_dir)?;
    let header: Vec<String> = [
        "problem",
        "N",
        "alpha_t",
        "alpha_r",
        "alpha_ap",
        "alpha_et",
        "beta_r",
        "sum_throughput",
        "aoi",
        "feasible",
        "best_fitness",
        "generations_to_best",
        "baseline_sum_throughput",
        "baseline_aoi",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![format!("{:?}", r.problem), r.elements.to_string()];
            line.extend(split_columns(&r.result.best).iter().map(|v| v.map(fmt_f64).unwrap_or_default()));
            line.push(fmt_f64(r.result.sum_throughput));
            line.push(fmt_f64(r.result.aoi_at_best));
            line.push(r.result.feasible.to_string());
            line.push(fmt_f64(r.result.best_fitness));
            line.push(r.result.generation_of_best.to_string());
            line.push(fmt_f64(r.baseline_sum_throughput));
            line.push(fmt_f64(r.baseline_aoi));
            line
        })
        .collect();
    let path = out_dir.join(&spec.output);
    write_csv(&path, &header, &body)?;
    let mut t = toml::Table::new();
    t.insert("file".into(), spec.output.clone().into());
    t.insert("ga_seed".into(), toml::Value::Integer(cfg.ga.expect("checked").seed as i64));
    t.insert("wall_clock_s".into(), secs.into());
    let manifest = write_manifest(out_dir, &cfg, "optimize", vec![("optimize".into(), t)])?;
    Ok(RunOutput { files: vec![path], manifest })
}
