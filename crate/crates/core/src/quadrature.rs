//! Numerical integration used by the closed forms.
//!
//! * [`integrate`]: globally adaptive Gauss-Kronrod (7/15) on finite
//!   intervals, for the residual integrals with a finite upper limit.
//! * [`ln_integrate`]: the same, for integrands known only as logarithms.
//! * [`ln_gauss_hermite`]: Gauss-Hermite on a log-substituted semi-infinite
//!   integral, re-centred on the integrand's peak.

use crate::channel::QuadratureRule;
use crate::error::{Error, Result};
use crate::special::ln_sum_exp;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-300, max_intervals: 4000 }
    }
}

/// An integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive integral of `f` over `[points[0], points[last]]`, with the
/// interior `points` as initial breakpoints.
///
/// Refines by bisecting the interval with the largest error until the
/// total error is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: AdaptiveOptions) -> Result<Estimate> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("integration needs at least two breakpoints".into()));
    }
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(points.len() + 64);
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let (v, e) = gk15(&f, a, b);
        segs.push((a, b, v, e));
    }
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Convergence(format!("non-finite integrand value (sum {total}, error {err})")));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(Estimate { value: total, error: err, intervals: segs.len() });
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "adaptive quadrature hit {} intervals with error {err:e} on value {total:e}",
                segs.len()
            )));
        }
        let (i, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty segment list");
        let (a, b, _, _) = segs.swap_remove(i);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::Convergence(format!("interval [{a:e}, {b:e}] cannot be bisected further")));
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        segs.push((a, m, v1, e1));
        segs.push((m, b, v2, e2));
    }
}

/// Breakpoints on `[a, b]` that also crowd geometrically towards `a`, for
/// integrable endpoint singularities.
pub fn split_towards_left(a: f64, b: f64, levels: u32) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=levels).rev().map(|k| a + (b - a) * 0.5f64.powi(k as i32)).collect();
    pts.insert(0, a);
    pts.dedup();
    pts
}

/// `n` equal pieces of `[a, b]`.
pub fn uniform_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// `ln ∫ e^{ln_f(x)} dx` over the breakpoint range.
///
/// The integrand is rescaled by its largest value on a probe grid before
/// integration so tiny probabilities neither underflow nor lose the
/// relative tolerance.
pub fn ln_integrate<F: Fn(f64) -> f64>(ln_f: F, points: &[f64], opts: AdaptiveOptions) -> Result<f64> {
    let a = points[0];
    let b = *points.last().expect("at least two breakpoints");
    if !(b > a) {
        return Ok(f64::NEG_INFINITY);
    }
    let mut shift = f64::NEG_INFINITY;
    for w in points.windows(2) {
        for j in 0..=16 {
            let x = w[0] + (w[1] - w[0]) * (j as f64 + 0.5) / 17.0;
            shift = shift.max(ln_f(x));
        }
    }
    if shift == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if shift.is_nan() {
        return Err(Error::Convergence("NaN log-integrand".into()));
    }
    let est = integrate(|x| (ln_f(x) - shift).exp(), points, AdaptiveOptions { abs_tol: 1e-300, ..opts })?;
    if est.value <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(shift + est.value.ln())
}

/// Diagnostics from one [`ln_gauss_hermite`] evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhFit {
    /// `ln ∫ h(u) du`.
    pub ln_value: f64,
    /// Peak location of `ln h`.
    pub center: f64,
    /// Gaussian width matched to the peak curvature.
    pub sigma: f64,
}

/// `ln ∫ h(u) du` over the real line, given `ln h`, by Gauss-Hermite.
///
/// The outage integrals are taken after the substitution `x = e^u`, which
/// leaves a single bell-shaped `h` whose peak may sit far from the origin.
/// The rule is applied as `u = c + √2·σ·s` with `c` the peak of `ln h`
/// (located inside `[lo, hi]`) and `σ` from its curvature, so
/// `∫h = √2σ Σ ψ_w e^{s_w²} h(c + √2σ s_w)`; all sums run in log space.
pub fn ln_gauss_hermite<F: Fn(f64) -> f64>(rule: &QuadratureRule, ln_h: F, lo: f64, hi: f64) -> GhFit {
    const PROBES: usize = 96;
    let step = (hi - lo) / (PROBES - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_i = 0;
    for i in 0..PROBES {
        let u = lo + step * i as f64;
        let v = ln_h(u);
        if v > best.1 {
            best = (u, v);
            best_i = i;
        }
    }
    if best.1 == f64::NEG_INFINITY {
        return GhFit { ln_value: f64::NEG_INFINITY, center: 0.5 * (lo + hi), sigma: 0.0 };
    }
    // Golden-section refinement around the best probe.
    let (mut a, mut b) = (lo + step * (best_i as f64 - 1.0), lo + step * (best_i as f64 + 1.0));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (ln_h(c), ln_h(d));
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = ln_h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = ln_h(d);
        }
    }
    let (center, peak) = if fc > fd { (c, fc) } else { (d, fd) };
    let (center, peak) = if peak >= best.1 { (center, peak) } else { best };

    let curvature = |delta: f64| {
        let l = ln_h(center - delta);
        let r = ln_h(center + delta);
        -(l - 2.0 * peak + r) / (delta * delta)
    };
    let mut sigma = step;
    let k0 = curvature(0.5 * step);
    if k0.is_finite() && k0 > 0.0 {
        sigma = 1.0 / k0.sqrt();
        let k1 = curvature(0.25 * sigma);
        if k1.is_finite() && k1 > 0.0 {
            sigma = 1.0 / k1.sqrt();
        }
    }
    let scale = std::f64::consts::SQRT_2 * sigma;
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| w.ln() + s * s + ln_h(center + scale * s))
        .collect();
    GhFit { ln_value: ln_sum_exp(&terms) + scale.ln(), center, sigma }
}
