//! Integrals behind the NOMA closed forms.
//!
//! With `X = G_t⁴`, `Y = G_r⁴` independent and `γ_t = c_t X`, `γ_r = c_r Y`:
//!
//! * `P1 = P(both cross-SINRs < γ_th)`, integrated over `Y` with the
//!   window `F_X(up(y)) − F_X(lo(y))` (Gauss-Hermite in `ln y`);
//! * `P2_t = P(γ_t < γ_th, γ_r/(γ_t+1) ≥ γ_th)`, the finite residual
//!   integral up to `γ_th/c_t`;
//! * `J_t = P(γ_r/(γ_t+1) ≥ γ_th)`, U_r decodable first (Gauss-Hermite in
//!   `ln x`).
//!
//! Then `P_out,t = P1 + P2_t`, and for `γ_th ≥ 1` the success event is the
//! disjoint union of {U_r first, then U_t} and its mirror, each equal to
//! `J − P2`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, OnceLock};

use crate::channel::{gauss_hermite_rule, GammaApprox, QuadratureRule, MAX_ORDER};
use crate::error::{Error, Result};
use crate::quadrature::{ln_gauss_hermite, ln_integrate, uniform_points, AdaptiveOptions, GhFit};
use crate::special::{int_gamma_tails, ln_1m_exp, ln_window, Tails};

/// Probability mass ignored outside the fitted support.
const SUPPORT_EPS: f64 = 1e-40;
const FINITE_PIECES: usize = 16;
/// Extra nodes in the companion rule that cross-checks each Gauss-Hermite sum.
const COMPANION_EXTRA: usize = 10;
/// Agreement demanded between the two rules (relative, absolute).
const COMPANION_TOL: (f64, f64) = (1e-7, 1e-12);
/// Share of P1 allowed on the window's cliff before Gauss-Hermite is bypassed.
const CLIFF_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct Side {
    g: GammaApprox,
    c: f64,
    v_lo: f64,
    v_hi: f64,
}

impl Side {
    fn new(g: GammaApprox, c: f64) -> Self {
        let (v_lo, v_hi) = g.amp_bounds(SUPPORT_EPS);
        Self { g, c, v_lo, v_hi }
    }
    fn ln_x_range(&self) -> (f64, f64) {
        (4.0 * self.v_lo.ln(), 4.0 * self.v_hi.ln())
    }
}

/// The two users as seen from one of them: `own` is the user whose
/// outage is being computed.
#[derive(Debug, Clone, Copy)]
struct Pair {
    own: Side,
    other: Side,
}

impl Pair {
    fn mirrored(&self) -> Self {
        Self { own: self.other, other: self.own }
    }
}

pub(crate) struct Noma<'a> {
    t_view: Pair,
    th: f64,
    rule: &'a QuadratureRule,
    opts: AdaptiveOptions,
}

/// Per-user pieces of the closed forms, as natural logs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NomaPieces {
    pub ln_p1: f64,
    pub ln_p2_t: f64,
    pub ln_p2_r: f64,
}

impl<'a> Noma<'a> {
    pub fn new(
        gt: GammaApprox,
        gr: GammaApprox,
        ct: f64,
        cr: f64,
        th: f64,
        rule: &'a QuadratureRule,
        rel_tol: f64,
    ) -> Self {
        Self {
            t_view: Pair { own: Side::new(gt, ct), other: Side::new(gr, cr) },
            th,
            rule,
            opts: AdaptiveOptions { rel_tol, ..Default::default() },
        }
    }

    fn r_view(&self) -> Pair {
        self.t_view.mirrored()
    }

    pub fn pieces(&self) -> Result<NomaPieces> {
        Ok(NomaPieces {
            ln_p1: self.ln_p1()?,
            ln_p2_t: self.ln_p2(&self.t_view)?,
            ln_p2_r: self.ln_p2(&self.r_view())?,
        })
    }

    /// Window of `X = own` values with both cross-SINRs below threshold,
    /// given `y = other`: `lo(y) < x < up(y)`.
    #[inline]
    fn window_tails(&self, p: &Pair, y: f64) -> (Tails, Tails) {
        let th = self.th;
        let up = th * (p.other.c * y + 1.0) / p.own.c;
        let lo = (p.other.c * y / th - 1.0) / p.own.c;
        let t_lo = if lo > 0.0 { p.own.g.tails(lo) } else { Tails { ln_p: f64::NEG_INFINITY, ln_q: 0.0 } };
        (t_lo, p.own.g.tails(up))
    }

    /// `ln P1`, integrated over U_r's gain.
    pub fn ln_p1(&self) -> Result<f64> {
        let p = self.t_view;
        let y_side = p.other;
        let ln_h = |u: f64| {
            let y = u.exp();
            let (a, b) = self.window_tails(&p, y);
            u + y_side.g.ln_pdf(y) + ln_window(a, b)
        };
        if self.th >= 1.0 {
            let window = |y: f64| {
                let (a, b) = self.window_tails(&p, y);
                ln_window(a, b)
            };
            let (lo, hi) = y_side.ln_x_range();
            let gh = match gh_checked(self.rule, ln_h, lo, hi, "P1") {
                Err(Error::Convergence(_)) => {
                    GH_FALLBACKS.fetch_add(1, Ordering::Relaxed);
                    None
                }
                other => Some(other?),
            };
            // Past y0 the lower edge leaves zero and sweeps through X's
            // support by y1; when c_other ≫ c_own that drop is a cliff no
            // Gauss-Hermite rule resolves. Split there if it carries mass.
            let y0 = self.th / y_side.c;
            let y1 = self.th * (1.0 + p.own.c * p.own.v_hi.powi(4)) / y_side.c;
            let (t0, t1) = (y_side.g.tails(y0), y_side.g.tails(y1));
            let ln_band = if t1.ln_p > t0.ln_p { t1.ln_p + ln_1m_exp(t0.ln_p - t1.ln_p) } else { f64::NEG_INFINITY };
            if let Some(v) = gh.filter(|&v| ln_band < v + CLIFF_REL.ln()) {
                return Ok(v);
            }
            let parts = [
                ln_residual(y_side.g, window, 0.0, y0, self.opts)?,
                ln_residual(y_side.g, window, y0, y1, self.opts)?,
                ln_residual(y_side.g, window, y1, f64::INFINITY, self.opts)?,
            ];
            Ok(crate::special::ln_sum_exp(&parts))
        } else {
            // The window closes for y beyond th/(c_r(1 − th)).
            let y_star = self.th / (y_side.c * (1.0 - self.th));
            let v_end = y_star.sqrt().sqrt().min(y_side.v_hi);
            if v_end <= y_side.v_lo {
                return Ok(f64::NEG_INFINITY);
            }
            let pts = uniform_points(y_side.v_lo, v_end, FINITE_PIECES);
            ln_integrate(
                |v| {
                    let (a, b) = self.window_tails(&p, v.powi(4));
                    y_side.g.ln_amp_pdf(v) + ln_window(a, b)
                },
                &pts,
                self.opts,
            )
        }
    }

    /// `ln Q_other(th(c_own x + 1)/c_other)`: the other user clears the
    /// threshold while treating `own` as interference.
    #[inline]
    fn ln_other_first(&self, p: &Pair, x: f64) -> f64 {
        p.other.g.tails(self.th * (p.own.c * x + 1.0) / p.other.c).ln_q
    }

    /// `ln P2` for the `own` user: residual integral over `x < th/c_own`.
    fn ln_p2(&self, p: &Pair) -> Result<f64> {
        let upper = self.th / p.own.c;
        ln_residual(p.own.g, |x| self.ln_other_first(p, x), 0.0, upper, self.opts)
    }

    /// `ln J` for the `own` user: the other user is decodable first.
    fn ln_cross(&self, p: &Pair) -> Result<f64> {
        let (lo, hi) = p.own.ln_x_range();
        let gh = gh_checked(self.rule, |u| u + p.own.g.ln_pdf(u.exp()) + self.ln_other_first(p, u.exp()), lo, hi, "J");
        gh_or_adaptive(gh, || ln_residual(p.own.g, |x| self.ln_other_first(p, x), 0.0, f64::INFINITY, self.opts))
    }

    /// `ln P(other decoded first, then own clears th alone)`, given
    /// `ln J` for the same view.
    fn ln_success_other_first(&self, p: &Pair, ln_p2: f64, ln_j: f64) -> Result<f64> {
        if ln_j == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let d = ln_p2 - ln_j;
        if d < (1.0 - 1e-6f64).ln() {
            return Ok(ln_j + ln_1m_exp(d.min(0.0)));
        }
        // J and P2 agree to six digits: integrate the difference directly.
        ln_residual(p.own.g, |x| self.ln_other_first(p, x), self.th / p.own.c, f64::INFINITY, self.opts)
    }

    /// Success pieces for `γ_th ≥ 1`, where the two decoding orders are
    /// exclusive.
    pub fn success_disjoint(&self, pieces: &NomaPieces) -> Result<SuccessPieces> {
        debug_assert!(self.th >= 1.0);
        let (t, r) = (self.t_view, self.r_view());
        // `ln_cross(r)` is U_t decodable first, and vice versa.
        let (ln_first_r, ln_first_t) = (self.ln_cross(&t)?, self.ln_cross(&r)?);
        Ok(SuccessPieces {
            ln_after_t: self.ln_success_other_first(&t, pieces.ln_p2_t, ln_first_r)?,
            ln_after_r: self.ln_success_other_first(&r, pieces.ln_p2_r, ln_first_t)?,
            ln_first_t,
            ln_first_r,
        })
    }
}

/// Logs of the decoding events for `γ_th ≥ 1`: `first_u` is "U_u decodable
/// while the other interferes"; `after_u` is "the other decoded first, then
/// U_u alone clears the threshold".
#[derive(Debug, Clone, Copy)]
pub(crate) struct SuccessPieces {
    pub ln_first_t: f64,
    pub ln_first_r: f64,
    pub ln_after_t: f64,
    pub ln_after_r: f64,
}

impl SuccessPieces {
    pub fn ln_success(&self) -> f64 {
        crate::special::ln_add_exp(self.ln_after_t, self.ln_after_r)
    }

    /// `1 − P_out` for each user: it is decoded either first or after the other.
    pub fn decoded(&self) -> (f64, f64) {
        (
            crate::special::ln_add_exp(self.ln_first_t, self.ln_after_t).exp(),
            crate::special::ln_add_exp(self.ln_first_r, self.ln_after_r).exp(),
        )
    }
}

/// `ln ∫_a^b e^{ln_g(x)} f(x) dx` over `X = G⁴`, taken in the amplitude
/// `v = x^{1/4}` where the Gamma density is smooth at the origin.
pub(crate) fn ln_residual<F: Fn(f64) -> f64>(
    g: GammaApprox,
    ln_g: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<f64> {
    let (v_lo, v_hi) = g.amp_bounds(SUPPORT_EPS);
    let va = a.max(0.0).sqrt().sqrt().max(v_lo);
    let vb = if b.is_finite() { b.sqrt().sqrt().min(v_hi) } else { v_hi };
    if !(vb > va) {
        return Ok(f64::NEG_INFINITY);
    }
    let pts = uniform_points(va, vb, FINITE_PIECES);
    ln_integrate(|v| ln_g(v.powi(4)) + g.ln_amp_pdf(v), &pts, opts)
}

fn companion_rule(order: usize) -> Result<&'static QuadratureRule> {
    static RULES: OnceLock<Mutex<HashMap<usize, &'static QuadratureRule>>> = OnceLock::new();
    let want = (order + COMPANION_EXTRA).min(MAX_ORDER);
    let mut map = RULES.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    if let Some(r) = map.get(&want) {
        return Ok(r);
    }
    let r: &'static QuadratureRule = Box::leak(Box::new(gauss_hermite_rule(want)?));
    map.insert(want, r);
    Ok(r)
}

/// Gauss-Hermite with two checks: the rule's outermost nodes must carry no
/// appreciable mass, and a rule with a few more nodes must agree. Either
/// failure means the rule does not resolve `ln_h`.
pub(crate) fn gh_checked<F: Fn(f64) -> f64>(
    rule: &QuadratureRule,
    ln_h: F,
    lo: f64,
    hi: f64,
    what: &str,
) -> Result<f64> {
    let fit: GhFit = ln_gauss_hermite(rule, &ln_h, lo, hi);
    if fit.ln_value.is_nan() {
        return Err(Error::Convergence(format!("{what}: NaN in Gauss-Hermite sum")));
    }
    if fit.ln_value == f64::NEG_INFINITY {
        return Ok(fit.ln_value);
    }
    let edge = |f: &GhFit| {
        let scale = std::f64::consts::SQRT_2 * f.sigma;
        [0, rule.order - 1]
            .iter()
            .map(|&i| {
                let s = rule.nodes[i];
                rule.weights[i].ln() + s * s + ln_h(f.center + scale * s) + scale.ln() - f.ln_value
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if rule.order < 8 {
        return Ok(fit.ln_value);
    }
    let e = edge(&fit);
    if e >= (1e-9f64).ln() {
        return Err(Error::Convergence(format!(
            "{what}: Gauss-Hermite rule of order {} does not resolve the integrand (edge mass {:e})",
            rule.order,
            e.exp()
        )));
    }
    let check = ln_gauss_hermite(companion_rule(rule.order)?, &ln_h, lo, hi).ln_value;
    let (a, b) = (fit.ln_value.exp(), check.exp());
    if !((a - b).abs() <= COMPANION_TOL.0 * a.max(b) + COMPANION_TOL.1) {
        return Err(Error::Convergence(format!(
            "{what}: Gauss-Hermite orders {} and {} disagree ({a:e} vs {b:e})",
            rule.order,
            rule.order + COMPANION_EXTRA
        )));
    }
    Ok(fit.ln_value)
}

static GH_FALLBACKS: AtomicU64 = AtomicU64::new(0);

/// Times a Gauss-Hermite sum was replaced by the adaptive route.
pub(crate) fn gh_fallbacks() -> u64 {
    GH_FALLBACKS.load(Ordering::Relaxed)
}

/// Keeps a resolved Gauss-Hermite value; otherwise integrates adaptively in
/// the amplitude, which needs no assumption on the integrand's shape.
fn gh_or_adaptive<F: FnOnce() -> Result<f64>>(gh: Result<f64>, adaptive: F) -> Result<f64> {
    match gh {
        Err(Error::Convergence(_)) => {
            GH_FALLBACKS.fetch_add(1, Ordering::Relaxed);
            adaptive()
        }
        other => other,
    }
}

/// `ln Q(n, ·)` shortcut used by the TDMA forms.
pub(crate) fn tails_at(g: &GammaApprox, x: f64) -> Tails {
    if x <= 0.0 {
        return int_gamma_tails(g.nk_int, 0.0);
    }
    g.tails(x)
}
