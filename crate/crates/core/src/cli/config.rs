//! TOML run configuration.
//!
//! A file is read into a [`toml::Table`], `--set` overrides and per-experiment
//! `set` tables are applied at dotted paths, and only then is the result
//! deserialized into [`RunConfig`] with unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::channel::{gauss_hermite_rule, NakagamiParams, QuadratureRule, MAX_ORDER};
use crate::error::{Error, Result};
use crate::montecarlo::{GainMode, McConfig};
use crate::optimizer::{GaConfig, Problem};
use crate::system::{EepPolicy, LinkFading, Scheme, SystemConfig, TdmaPolicy, TepPolicy};

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// `[system]`: physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    /// AP transmit power, W.
    pub p_ap_w: f64,
    /// Transmit SNR `P_AP/N0`, dB. Sets the noise power.
    pub snr_db: f64,
    /// AP–RIS, RIS–U_t and RIS–U_r distances, m.
    pub d0_m: f64,
    pub d_t_m: f64,
    pub d_r_m: f64,
    /// Path-loss exponents of the same three links.
    pub exp_0: f64,
    pub exp_t: f64,
    pub exp_r: f64,
    /// STAR-RIS elements N.
    pub elements: u32,
    /// Target rate R, bit/s/Hz.
    pub rate: f64,
    pub fading: LinkFading,
}

impl Default for SystemSection {
    fn default() -> Self {
        let s = SystemConfig::default();
        Self {
            p_ap_w: s.p_ap,
            snr_db: s.snr_db(),
            d0_m: s.d0,
            d_t_m: s.d_t,
            d_r_m: s.d_r,
            exp_0: s.pl_exp_0,
            exp_t: s.pl_exp_t,
            exp_r: s.pl_exp_r,
            elements: s.elements,
            rate: s.rate,
            fading: LinkFading::uniform(NakagamiParams { m: 2.0, omega: 1.0 }),
        }
    }
}

impl SystemSection {
    pub fn to_config(&self) -> Result<SystemConfig> {
        if !self.snr_db.is_finite() {
            return config_err(format!("system.snr_db must be finite, got {}", self.snr_db));
        }
        let c = SystemConfig {
            p_ap: self.p_ap_w,
            n0: 1.0,
            d0: self.d0_m,
            d_t: self.d_t_m,
            d_r: self.d_r_m,
            pl_exp_0: self.exp_0,
            pl_exp_t: self.exp_t,
            pl_exp_r: self.exp_r,
            elements: self.elements,
            fading: self.fading,
            rate: self.rate,
        }
        .with_snr_db(self.snr_db);
        c.validate()?;
        Ok(c)
    }
}

/// `[policy.*]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub tep: TepPolicy,
    pub eep: EepPolicy,
    pub tdma: TdmaPolicy,
}

/// `[quadrature]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    /// Gauss-Hermite order W.
    pub order: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        Self { order: crate::analytics::DEFAULT_ORDER }
    }
}

impl QuadratureSection {
    pub fn rule(&self) -> Result<QuadratureRule> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return config_err(format!("quadrature.order must lie in 1..={MAX_ORDER}, got {}", self.order));
        }
        gauss_hermite_rule(self.order)
    }
}

/// `[mc]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub trials: u64,
    pub seed: u64,
    pub gain_mode: GainMode,
}

impl Default for McSection {
    fn default() -> Self {
        Self { trials: 1_000_000, seed: 1, gain_mode: GainMode::IndependentGains }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    SnrDb,
    #[serde(rename = "N")]
    Elements,
    #[serde(rename = "R")]
    Rate,
    /// TEP: `α_AP`; EEP: `α_IT`; TDMA: total uplink fraction.
    Alpha,
    BetaR,
}

impl SweepVariable {
    pub fn column(&self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::Elements => "N",
            SweepVariable::Rate => "R",
            SweepVariable::Alpha => "alpha",
            SweepVariable::BetaR => "beta_r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    OutageT,
    OutageR,
    ThroughputT,
    ThroughputR,
    SumThroughput,
    Phi,
    Aoi,
}

impl Metric {
    pub fn column(&self) -> &'static str {
        match self {
            Metric::OutageT => "outage_t",
            Metric::OutageR => "outage_r",
            Metric::ThroughputT => "throughput_t",
            Metric::ThroughputR => "throughput_r",
            Metric::SumThroughput => "sum_throughput",
            Metric::Phi => "phi",
            Metric::Aoi => "aoi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Montecarlo,
    Both,
}

/// Grid given either as explicit values or as `start`/`stop` with a `step`
/// or a point count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl Sweep {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let g = match (&self.values, self.start, self.stop, self.step, self.points) {
            (Some(v), None, None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(h), None) => {
                if !(h > 0.0) || b < a {
                    return config_err("sweep step must be positive and stop ≥ start");
                }
                let n = ((b - a) / h + 1e-9).floor() as usize + 1;
                (0..n).map(|i| a + h * i as f64).collect()
            }
            (None, Some(a), Some(b), None, Some(n)) => match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            },
            _ => return config_err("sweep needs either `values`, or `start`/`stop` with exactly one of `step`/`points`"),
        };
        if g.is_empty() {
            return config_err("sweep grid is empty");
        }
        if g.iter().any(|x| !x.is_finite()) {
            return config_err("sweep grid contains a non-finite value");
        }
        if self.variable == SweepVariable::Elements && g.iter().any(|&x| x < 1.0 || x.fract() != 0.0) {
            return config_err("sweep over N needs positive integers");
        }
        Ok(g)
    }
}

/// One `[[experiment]]` entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    pub sweep: Sweep,
    pub metrics: Vec<Metric>,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output file name, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Overrides applied to the base configuration for this experiment only.
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub set: toml::Table,
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn default_engine() -> Engine {
    Engine::Analytic
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return config_err("experiment name must not be empty");
        }
        if self.metrics.is_empty() {
            return config_err(format!("experiment `{}`: metrics list is empty", self.name));
        }
        if self.schemes.is_empty() {
            return config_err(format!("experiment `{}`: schemes list is empty", self.name));
        }
        if self.trials == Some(0) {
            return config_err(format!("experiment `{}`: trials must be at least 1", self.name));
        }
        self.sweep.grid().map_err(|e| Error::Config(format!("experiment `{}`: {e}", self.name)))?;
        Ok(())
    }

    pub fn file_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{}.csv", self.name))
    }
}

/// `[optimize]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSpec {
    #[serde(default = "both_problems")]
    pub problems: Vec<Problem>,
    /// Element counts N to optimize at.
    pub elements: Vec<u32>,
    /// Required AoI bound Δ_th (slots).
    pub aoi_threshold: Option<f64>,
    #[serde(default = "default_opt_output")]
    pub output: String,
}

fn both_problems() -> Vec<Problem> {
    vec![Problem::P1, Problem::P2]
}

fn default_opt_output() -> String {
    "optimize.csv".into()
}

impl OptimizeSpec {
    pub fn threshold(&self) -> Result<f64> {
        match self.aoi_threshold {
            None => config_err("optimize.aoi_threshold is required"),
            Some(t) if !(t > 1.0 && t.is_finite()) => config_err(format!("optimize.aoi_threshold must exceed 1, got {t}")),
            Some(t) => Ok(t),
        }
    }
}

/// The whole file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub experiment: Vec<ExperimentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSpec>,
    /// Written by the runner; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<toml::Table>,
}

impl RunConfig {
    pub fn from_table(table: toml::Table) -> Result<Self> {
        let c: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        c.system.to_config()?;
        c.quadrature.rule()?;
        c.policy.tep.validate()?;
        c.policy.eep.validate()?;
        c.policy.tdma.validate()?;
        if c.mc.trials == 0 {
            return config_err("mc.trials must be at least 1");
        }
        if let Some(ga) = &c.ga {
            ga.validate()?;
        }
        let mut names = std::collections::HashSet::new();
        for e in &c.experiment {
            e.validate()?;
            if !names.insert(e.file_name()) {
                return config_err(format!("two experiments write `{}`", e.file_name()));
            }
        }
        Ok(c)
    }

    pub fn mc_for(&self, e: &ExperimentSpec) -> McConfig {
        McConfig {
            trials: e.trials.unwrap_or(self.mc.trials),
            seed: e.seed.unwrap_or(self.mc.seed),
            gain_mode: self.mc.gain_mode,
        }
    }
}

pub fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))
}

/// Interprets an override value as a TOML literal, falling back to a bare
/// string (so `--set mc.gain_mode=SharedH` needs no quoting).
pub fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Sets `path` (dot-separated; numeric segments index arrays) to `value`,
/// creating intermediate tables.
pub fn set_path(root: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return config_err(format!("malformed key `{path}`"));
    }
    let mut cur: &mut toml::Value = root
        .entry(parts[0].to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    for part in &parts[1..] {
        cur = match cur {
            toml::Value::Table(t) => t.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new())),
            toml::Value::Array(a) => {
                let i: usize = part.parse().map_err(|_| Error::Config(format!("`{part}` in `{path}` is not an array index")))?;
                let len = a.len();
                a.get_mut(i).ok_or_else(|| Error::Config(format!("index {i} out of range in `{path}` (length {len})")))?
            }
            _ => return config_err(format!("`{path}` descends into a non-table value")),
        };
    }
    *cur = value;
    Ok(())
}

/// Applies `key=value` overrides.
pub fn apply_overrides(root: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let Some((k, v)) = o.split_once('=') else {
            return config_err(format!("override `{o}` is not of the form key=value"));
        };
        set_path(root, k.trim(), parse_value(v.trim()))?;
    }
    Ok(())
}

/// Recursive merge: tables merge key by key, anything else in `over` wins.
pub fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
