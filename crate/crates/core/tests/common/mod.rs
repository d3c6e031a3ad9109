#![allow(dead_code)]

use starris::montecarlo::{mc_gains, GainMode, McConfig};
use starris::system::{EepPolicy, Policy, SystemConfig, TdmaPolicy, TepPolicy};

pub fn schemes() -> [Policy; 3] {
    [Policy::Tep(TepPolicy::default()), Policy::Eep(EepPolicy::default()), Policy::Tdma(TdmaPolicy::default())]
}

pub fn snr_grid() -> Vec<f64> {
    (0..7).map(|i| 20.0 + 5.0 * i as f64).collect()
}

/// `count` draws of `|Σ hᵢgᵢ|⁴` for one user.
pub fn quartic_samples(elements: u32, count: u64, seed: u64) -> Vec<f64> {
    let c = SystemConfig::default().with_elements(elements);
    let mc = McConfig::new(count, seed, GainMode::IndependentGains).unwrap();
    mc_gains(&c, &mc).unwrap().map(|(g, _)| g.powi(4)).collect()
}

/// Two-sided Kolmogorov-Smirnov distance of a sample against `cdf`.
pub fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// The analytic-versus-oracle rule: 10% relative where the estimate is at
/// least 1e-3, three standard errors below. The binomial error uses
/// `max(estimate, analytic, 1/T)` so that an empty count still has a
/// nonzero error bar.
pub fn oracle_agrees(analytic: f64, estimate: f64, trials: u64, rel: f64) -> bool {
    if estimate >= 1e-3 {
        (analytic - estimate).abs() <= rel * estimate
    } else {
        let p = estimate.max(analytic).max(1.0 / trials as f64);
        (analytic - estimate).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt()
    }
}

/// Local maxima strictly inside the grid, counting a plateau once.
pub fn interior_maxima(ys: &[f64]) -> usize {
    let mut count = 0;
    let mut i = 1;
    while i + 1 < ys.len() {
        let mut j = i;
        while j + 1 < ys.len() && ys[j + 1] == ys[i] {
            j += 1;
        }
        if j + 1 < ys.len() && ys[i] > ys[i - 1] && ys[i] > ys[j + 1] {
            count += 1;
        }
        i = j + 1;
    }
    count
}

/// Sign changes of a sequence, ignoring exact zeros.
pub fn sign_changes(ys: &[f64]) -> usize {
    let signs: Vec<bool> = ys.iter().filter(|y| **y != 0.0).map(|y| *y > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Grid comparison for a maximizer: the reference optimum of an `n × n`
/// row-major table, the fitness spread of its eight neighbours, and how
/// far (in cells) `best` lies from it.
pub struct CellCheck {
    pub grid_best: f64,
    pub neighbour_drop: f64,
    pub cells_away: f64,
}

pub fn cell_check(table: &[f64], axis: &[f64], best: &[f64]) -> CellCheck {
    let n = axis.len();
    let (k, &grid_best) = table.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let (i, j) = ((k / n) as i64, (k % n) as i64);
    let mut neighbour_drop: f64 = 0.0;
    for di in -1..=1 {
        for dj in -1..=1 {
            let (a, b) = (i + di, j + dj);
            if (di, dj) != (0, 0) && (0..n as i64).contains(&a) && (0..n as i64).contains(&b) {
                neighbour_drop = neighbour_drop.max(grid_best - table[a as usize * n + b as usize]);
            }
        }
    }
    let step = axis[1] - axis[0];
    let cells_away = ((best[0] - axis[i as usize]).abs().max((best[1] - axis[j as usize]).abs())) / step;
    CellCheck { grid_best, neighbour_drop, cells_away }
}

impl CellCheck {
    /// The found fitness is no worse than stepping one cell off the grid optimum.
    pub fn passes(&self, fitness: f64) -> bool {
        fitness >= self.grid_best - self.neighbour_drop
    }
}
