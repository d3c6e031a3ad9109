//! GA-TAPA: a binary-coded genetic algorithm that maximizes sum throughput
//! over the time and power splits, with an additive penalty on average AoI
//! above `Δ_th`.
//!
//! The evolutionary loop ([`ga_maximize`]) is generic over the objective so
//! it can be exercised on test functions; [`ga_run`] wires it to the closed
//! forms.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{average_aoi, evaluate};
use crate::channel::QuadratureRule;
use crate::error::{invalid, Error, Result};
use crate::system::{EepPolicy, Policy, SystemConfig, TepPolicy};

/// Bounds every decision variable is mapped into.
pub const VAR_LO: f64 = 0.01;
pub const VAR_HI: f64 = 0.99;

/// `P1` optimizes TEP, `P2` optimizes EEP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    P1,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    /// Population size ε.
    pub population: usize,
    pub generations: usize,
    /// Bits per decision variable Ξ.
    pub bits: u32,
    /// Fraction of the ranked population eligible as fathers.
    pub selection: f64,
    pub crossover: f64,
    /// Per-bit flip probability.
    pub mutation: f64,
    pub penalty: f64,
    pub seed: u64,
    pub elitism: usize,
    /// P1 only: optimize `(α_t, α_r, α_AP, β_r)` instead of `(α_AP, β_r)`.
    pub extended: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 100,
            bits: 16,
            selection: 0.8,
            crossover: 0.8,
            mutation: 0.01,
            penalty: 1e3,
            seed: 1,
            elitism: 1,
            extended: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return invalid("GA population must be at least 2");
        }
        if self.generations == 0 {
            return invalid("GA needs at least one generation");
        }
        if !(4..=32).contains(&self.bits) {
            return invalid(format!("bits per variable must lie in 4..=32, got {}", self.bits));
        }
        if !(self.selection > 0.0 && self.selection < 1.0) {
            return invalid(format!("selection probability must lie in (0, 1), got {}", self.selection));
        }
        if !(self.crossover > 0.0 && self.crossover <= 1.0) {
            return invalid(format!("crossover probability must lie in (0, 1], got {}", self.crossover));
        }
        if !(self.mutation >= 0.0 && self.mutation < 1.0) {
            return invalid(format!("mutation probability must lie in [0, 1), got {}", self.mutation));
        }
        if !(self.penalty > 0.0 && self.penalty.is_finite()) {
            return invalid(format!("penalty coefficient must be positive, got {}", self.penalty));
        }
        if self.elitism >= self.population {
            return invalid("elitism count must be smaller than the population");
        }
        Ok(())
    }
}

/// A candidate split. Every variant maps to a policy that satisfies the
/// sum-to-one and open-interval constraints by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Allocation {
    /// `α_t = α_r = (1 − α_AP)/2`, `β_t = 1 − β_r`.
    Tep { alpha_ap: f64, beta_r: f64 },
    /// `α_IT = 1 − α_ET`, `β_t = 1 − β_r`.
    Eep { alpha_et: f64, beta_r: f64 },
    /// Three raw time weights normalized to sum to one.
    TepExtended { alpha_t: f64, alpha_r: f64, alpha_ap: f64, beta_r: f64 },
}

impl Allocation {
    pub fn problem(&self) -> Problem {
        match self {
            Allocation::Eep { .. } => Problem::P2,
            _ => Problem::P1,
        }
    }

    pub fn policy(&self) -> Policy {
        match *self {
            Allocation::Tep { alpha_ap, beta_r } => Policy::Tep(TepPolicy::symmetric(alpha_ap, beta_r)),
            Allocation::Eep { alpha_et, beta_r } => Policy::Eep(EepPolicy::from_split(alpha_et, beta_r)),
            Allocation::TepExtended { alpha_t, alpha_r, alpha_ap, beta_r } => Policy::Tep(TepPolicy {
                alpha_t,
                alpha_r,
                alpha_ap,
                beta_t: 1.0 - beta_r,
                beta_r,
            }),
        }
    }

    /// Decision variables in encoding order.
    pub fn variables(&self) -> Vec<f64> {
        match *self {
            Allocation::Tep { alpha_ap, beta_r } => vec![alpha_ap, beta_r],
            Allocation::Eep { alpha_et, beta_r } => vec![alpha_et, beta_r],
            Allocation::TepExtended { alpha_t, alpha_r, alpha_ap, beta_r } => {
                // Any positive triple with these ratios decodes to the same
                // split; pick the one whose largest weight sits at VAR_HI.
                let m = alpha_t.max(alpha_r).max(alpha_ap);
                vec![alpha_t / m * VAR_HI, alpha_r / m * VAR_HI, alpha_ap / m * VAR_HI, beta_r]
            }
        }
    }

    fn from_variables(problem: Problem, extended: bool, v: &[f64]) -> Self {
        match (problem, extended) {
            (Problem::P1, false) => Allocation::Tep { alpha_ap: v[0], beta_r: v[1] },
            (Problem::P2, _) => Allocation::Eep { alpha_et: v[0], beta_r: v[1] },
            (Problem::P1, true) => {
                let s = v[0] + v[1] + v[2];
                Allocation::TepExtended { alpha_t: v[0] / s, alpha_r: v[1] / s, alpha_ap: v[2] / s, beta_r: v[3] }
            }
        }
    }
}

/// Fixed baseline: `α_AP` (TEP) or `α_ET` (EEP) at 0.5, `β_r = 0.4`.
pub fn baseline(problem: Problem) -> Allocation {
    match problem {
        Problem::P1 => Allocation::Tep { alpha_ap: 0.5, beta_r: 0.4 },
        Problem::P2 => Allocation::Eep { alpha_et: 0.5, beta_r: 0.4 },
    }
}

fn quantize(x: f64, bits: u32) -> u64 {
    let max = ((1u64 << bits) - 1) as f64;
    ((x.clamp(VAR_LO, VAR_HI) - VAR_LO) / (VAR_HI - VAR_LO) * max).round() as u64
}

fn dequantize(q: u64, bits: u32) -> f64 {
    let max = ((1u64 << bits) - 1) as f64;
    VAR_LO + (VAR_HI - VAR_LO) * q as f64 / max
}

/// Most significant bit first, one `bits`-wide field per variable.
pub fn encode_vars(vars: &[f64], bits: u32) -> Vec<bool> {
    vars.iter()
        .flat_map(|&x| {
            let q = quantize(x, bits);
            (0..bits).rev().map(move |b| (q >> b) & 1 == 1)
        })
        .collect()
}

pub fn decode_vars(bitstring: &[bool], bits: u32, n_vars: usize) -> Result<Vec<f64>> {
    if bitstring.len() != bits as usize * n_vars {
        return invalid(format!(
            "bitstring has {} bits, expected {} for {n_vars} variables of {bits} bits",
            bitstring.len(),
            bits as usize * n_vars
        ));
    }
    Ok(bitstring
        .chunks(bits as usize)
        .map(|field| dequantize(field.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64), bits))
        .collect())
}

pub fn encode(alloc: &Allocation, bits: u32) -> Vec<bool> {
    encode_vars(&alloc.variables(), bits)
}

pub fn decode(problem: Problem, extended: bool, bitstring: &[bool], bits: u32) -> Result<Allocation> {
    let n = n_vars(problem, extended);
    Ok(Allocation::from_variables(problem, extended, &decode_vars(bitstring, bits, n)?))
}

fn n_vars(problem: Problem, extended: bool) -> usize {
    if extended && problem == Problem::P1 {
        4
    } else {
        2
    }
}

/// Throughput and AoI of one allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub sum_throughput: f64,
    pub aoi: f64,
    pub fitness: f64,
}

/// `T − penalty·max(0, Δ − Δ_th)`.
pub fn penalty_fitness(sum_throughput: f64, aoi: f64, aoi_threshold: f64, penalty: f64) -> f64 {
    sum_throughput - penalty * (aoi - aoi_threshold).max(0.0)
}

pub fn assess(
    alloc: &Allocation,
    config: &SystemConfig,
    aoi_threshold: f64,
    penalty: f64,
    quad: &QuadratureRule,
) -> Result<Assessment> {
    let r = evaluate(config, &alloc.policy(), quad)?;
    let aoi = average_aoi(r.success_prob);
    Ok(Assessment {
        sum_throughput: r.sum_throughput,
        aoi,
        fitness: penalty_fitness(r.sum_throughput, aoi, aoi_threshold, penalty),
    })
}

/// Penalized fitness of `alloc`.
pub fn penalized_fitness(
    alloc: &Allocation,
    config: &SystemConfig,
    aoi_threshold: f64,
    penalty: f64,
    quad: &QuadratureRule,
) -> Result<f64> {
    if !(aoi_threshold > 1.0) {
        return invalid(format!("AoI threshold must exceed 1, got {aoi_threshold}"));
    }
    Ok(assess(alloc, config, aoi_threshold, penalty, quad)?.fitness)
}

/// Outcome of the generic loop.
#[derive(Debug, Clone, PartialEq)]
pub struct GaTrace {
    pub best: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness after each generation's evaluation.
    pub history: Vec<f64>,
    /// First generation (0-based) at which the final best was reached.
    pub generation_of_best: usize,
    pub evaluations: usize,
}

/// Maximizes `objective` over `n_vars` variables in `(VAR_LO, VAR_HI)`.
///
/// Each generation: rank, keep the `elitism` best, and fill the rest with
/// children of a father drawn from the top `⌈q_t·ε⌉` and a mother drawn
/// from the whole population, using single-point crossover (probability
/// `p_t`) and per-bit mutation (`p_m`). Fitness values are cached per
/// chromosome and a generation is evaluated in parallel, gathered in
/// population order.
pub fn ga_maximize<F>(n_vars: usize, ga: &GaConfig, objective: F) -> Result<GaTrace>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    ga.validate()?;
    if n_vars == 0 {
        return invalid("GA needs at least one variable");
    }
    let len = n_vars * ga.bits as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut pop: Vec<Vec<bool>> =
        (0..ga.population).map(|_| (0..len).map(|_| rng.random_bool(0.5)).collect()).collect();
    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut history = Vec::with_capacity(ga.generations);
    let mut best: (Vec<bool>, f64) = (Vec::new(), f64::NEG_INFINITY);
    let mut generation_of_best = 0;
    let n_fathers = ((ga.selection * ga.population as f64).ceil() as usize).clamp(1, ga.population);

    for gen in 0..ga.generations {
        let fresh: Vec<&Vec<bool>> = {
            let mut seen = std::collections::HashSet::new();
            pop.iter().filter(|c| !cache.contains_key(*c) && seen.insert(*c)).collect()
        };
        let values: Vec<Result<f64>> = fresh
            .par_iter()
            .map(|c| objective(&decode_vars(c, ga.bits, n_vars)?))
            .collect();
        for (c, v) in fresh.into_iter().zip(values) {
            let v = v?;
            if v.is_nan() {
                return Err(Error::Convergence("objective returned NaN".into()));
            }
            cache.insert(c.clone(), v);
        }
        let mut ranked: Vec<(f64, &Vec<bool>)> = pop.iter().map(|c| (cache[c], c)).collect();
        // Stable sort on fitness keeps ties in population order.
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        if ranked[0].0 > best.1 {
            best = (ranked[0].1.clone(), ranked[0].0);
            generation_of_best = gen;
        }
        history.push(best.1);
        if gen + 1 == ga.generations {
            break;
        }
        let mut next: Vec<Vec<bool>> = ranked.iter().take(ga.elitism).map(|(_, c)| (*c).clone()).collect();
        let fathers: Vec<&Vec<bool>> = ranked.iter().take(n_fathers).map(|(_, c)| *c).collect();
        while next.len() < ga.population {
            let father = *fathers.choose(&mut rng).expect("non-empty");
            let mother = pop.choose(&mut rng).expect("non-empty");
            let (mut a, mut b) = (father.clone(), mother.clone());
            if rng.random_bool(ga.crossover) && len > 1 {
                let cut = rng.random_range(1..len);
                a[cut..].copy_from_slice(&mother[cut..]);
                b[cut..].copy_from_slice(&father[cut..]);
            }
            for child in [&mut a, &mut b] {
                for bit in child.iter_mut() {
                    if rng.random_bool(ga.mutation) {
                        *bit = !*bit;
                    }
                }
            }
            next.push(a);
            if next.len() < ga.population {
                next.push(b);
            }
        }
        pop = next;
    }
    Ok(GaTrace {
        best: decode_vars(&best.0, ga.bits, n_vars)?,
        best_fitness: best.1,
        history,
        generation_of_best,
        evaluations: cache.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Allocation,
    pub best_fitness: f64,
    pub sum_throughput: f64,
    pub aoi_at_best: f64,
    /// `aoi_at_best < Δ_th`.
    pub feasible: bool,
    pub history: Vec<f64>,
    pub generation_of_best: usize,
}

/// Runs GA-TAPA for `problem`. When no allocation meets the AoI constraint
/// the penalty steers the search to the least-violating one and
/// `feasible` is false.
pub fn ga_run(
    problem: Problem,
    config: &SystemConfig,
    aoi_threshold: f64,
    ga: &GaConfig,
    quad: &QuadratureRule,
) -> Result<GaResult> {
    if !(aoi_threshold > 1.0) {
        return invalid(format!("AoI threshold must exceed 1, got {aoi_threshold}"));
    }
    config.validate()?;
    let extended = ga.extended && problem == Problem::P1;
    let n = n_vars(problem, extended);
    let trace = ga_maximize(n, ga, |v| {
        let a = Allocation::from_variables(problem, extended, v);
        Ok(assess(&a, config, aoi_threshold, ga.penalty, quad)?.fitness)
    })?;
    let best = Allocation::from_variables(problem, extended, &trace.best);
    let at = assess(&best, config, aoi_threshold, ga.penalty, quad)?;
    Ok(GaResult {
        best,
        best_fitness: trace.best_fitness,
        sum_throughput: at.sum_throughput,
        aoi_at_best: at.aoi,
        feasible: at.aoi < aoi_threshold,
        history: trace.history,
        generation_of_best: trace.generation_of_best,
    })
}

/// Exhaustive search over the `n × n` lattice of a two-variable problem.
/// Returns the row-major fitness table and the lattice coordinates.
pub fn grid_search<F>(n: usize, objective: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if n < 2 {
        return invalid("grid needs at least two points per axis");
    }
    let axis: Vec<f64> = (0..n).map(|i| VAR_LO + (VAR_HI - VAR_LO) * i as f64 / (n - 1) as f64).collect();
    let table = (0..n * n)
        .into_par_iter()
        .map(|k| objective(&[axis[k / n], axis[k % n]]))
        .collect::<Result<Vec<_>>>()?;
    Ok((table, axis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_codes() {
        assert_eq!(decode_vars(&[false; 16], 16, 1).unwrap(), vec![VAR_LO]);
        assert_eq!(decode_vars(&[true; 16], 16, 1).unwrap(), vec![VAR_HI]);
        assert!(decode_vars(&[true; 15], 16, 1).is_err());
    }

    #[test]
    fn penalty_branches() {
        assert_eq!(penalty_fitness(1.5, 9.0, 10.0, 1e3), 1.5);
        assert_eq!(penalty_fitness(1.5, 11.0, 10.0, 1e3), 1.5 - 1e3);
    }

    #[test]
    fn constant_objective() {
        let ga = GaConfig { generations: 7, ..Default::default() };
        let t = ga_maximize(2, &ga, |_| Ok(1.0)).unwrap();
        assert_eq!(t.best_fitness, 1.0);
        assert_eq!(t.history.len(), 7);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(GaConfig { population: 1, ..Default::default() }.validate().is_err());
        assert!(GaConfig { bits: 3, ..Default::default() }.validate().is_err());
        assert!(GaConfig { elitism: 50, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn extended_allocation_roundtrip() {
        let a = Allocation::TepExtended { alpha_t: 0.2, alpha_r: 0.3, alpha_ap: 0.5, beta_r: 0.6 };
        let b = decode(Problem::P1, true, &encode(&a, 16), 16).unwrap();
        let (Allocation::TepExtended { alpha_t, alpha_r, alpha_ap, beta_r }, true) = (b, true) else { panic!() };
        assert!((alpha_t - 0.2).abs() < 1e-4 && (alpha_r - 0.3).abs() < 1e-4);
        assert!((alpha_ap - 0.5).abs() < 1e-4 && (beta_r - 0.6).abs() < 1e-4);
        assert!(b.policy().validate().is_ok());
    }
}
