//! Closed-form outage, throughput, success probability and average AoI.
//!
//! Series are evaluated with the rounded shape `nk_int`. Probabilities are
//! carried as logarithms until the end, then clamped to `[0, 1]`; each
//! clamp that actually moves a value is counted in [`clamp_events`].

mod noma;

use std::sync::atomic::{AtomicU64, Ordering};

use crate::channel::{GammaApprox, QuadratureRule};
use crate::error::{Error, Result};
use crate::quadrature::AdaptiveOptions;
use crate::special::{ln_factorial, ln_sum_exp};
use crate::system::{
    pathloss, snr_coefficients, EepPolicy, Policy, Scheme, SystemConfig, TdmaPolicy, TepPolicy, User,
};

use noma::{ln_residual, tails_at, Noma};

/// Relative tolerance of the finite-interval integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default Gauss-Hermite order.
pub const DEFAULT_ORDER: usize = 30;

static CLAMP_EVENTS: AtomicU64 = AtomicU64::new(0);
// Bit pattern of the largest excursion; ordering of non-negative f64 bits
// matches numeric ordering.
static CLAMP_WORST: AtomicU64 = AtomicU64::new(0);

/// Number of Gauss-Hermite sums that failed their edge-mass or
/// companion-rule check and were recomputed by adaptive quadrature.
pub fn gauss_hermite_fallbacks() -> u64 {
    noma::gh_fallbacks()
}

/// Number of times a computed probability had to be pulled back into `[0, 1]`.
pub fn clamp_events() -> u64 {
    CLAMP_EVENTS.load(Ordering::Relaxed)
}

/// Largest distance outside `[0, 1]` seen by any clamp so far.
pub fn clamp_worst_excursion() -> f64 {
    f64::from_bits(CLAMP_WORST.load(Ordering::Relaxed))
}

fn finish(p: f64, what: &str) -> Result<f64> {
    if p.is_nan() {
        return Err(Error::Convergence(format!("{what} evaluated to NaN")));
    }
    if p < 0.0 || p > 1.0 {
        CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed);
        let excess = if p < 0.0 { -p } else { p - 1.0 };
        CLAMP_WORST.fetch_max(excess.to_bits(), Ordering::Relaxed);
        return Ok(p.clamp(0.0, 1.0));
    }
    Ok(p)
}

/// Named constants of the closed forms.
///
/// `a`, `b` are the TEP SNR coefficients of U_t and U_r; `c_t`, `d_t`,
/// `c_r`, `d_r` the EEP ones as seen from each user (own, other); `u1`,
/// `u2` and `v1`, `v2` the noise-free signal constants of the success
/// probabilities; `u5`, `u6` the TDMA SNR ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConstants {
    pub a: f64,
    pub b: f64,
    pub c_t: f64,
    pub d_t: f64,
    pub c_r: f64,
    pub d_r: f64,
    pub u1: f64,
    pub u2: f64,
    pub u5: f64,
    pub u6: f64,
    pub v1: f64,
    pub v2: f64,
}

pub fn scheme_constants(config: &SystemConfig, tep: &TepPolicy, eep: &EepPolicy, tdma: &TdmaPolicy) -> SchemeConstants {
    let (a, b) = snr_coefficients(&Policy::Tep(*tep), config);
    let (et, er) = snr_coefficients(&Policy::Eep(*eep), config);
    let (tt, tr) = snr_coefficients(&Policy::Tdma(*tdma), config);
    let lt = pathloss(config, User::T);
    let lr = pathloss(config, User::R);
    let p = config.p_ap;
    SchemeConstants {
        a,
        b,
        c_t: et,
        d_t: er,
        c_r: er,
        d_r: et,
        u1: p * lr * lr * tep.beta_r * tep.alpha_r,
        u2: p * lt * lt * tep.beta_t * tep.alpha_t,
        u5: tr / tt,
        u6: tt / tr,
        v1: p * lr * lr * eep.beta_r * eep.beta_r * eep.alpha_et,
        v2: p * lt * lt * eep.beta_t * eep.beta_t * eep.alpha_et,
    }
}

/// Everything the closed forms produce for one scheme at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfReport {
    pub scheme: Scheme,
    pub p_out_t: f64,
    pub p_out_r: f64,
    pub throughput_t: f64,
    pub throughput_r: f64,
    pub sum_throughput: f64,
    pub success_prob: f64,
    pub avg_aoi: f64,
}

struct Prepared {
    gt: GammaApprox,
    gr: GammaApprox,
    ct: f64,
    cr: f64,
    th: f64,
}

fn prepare(config: &SystemConfig, policy: &Policy) -> Result<Prepared> {
    config.validate()?;
    policy.validate()?;
    let (ct, cr) = snr_coefficients(policy, config);
    Ok(Prepared {
        gt: config.gamma_approx(User::T)?,
        gr: config.gamma_approx(User::R)?,
        ct: ct.max(f64::MIN_POSITIVE),
        cr: cr.max(f64::MIN_POSITIVE),
        th: config.gamma_th(),
    })
}

/// Outage and success for the two NOMA schemes.
fn noma_eval(p: &Prepared, quad: &QuadratureRule, rel_tol: f64) -> Result<(f64, f64, f64)> {
    if p.th <= 0.0 {
        return Ok((0.0, 0.0, 1.0));
    }
    let k = Noma::new(p.gt, p.gr, p.ct, p.cr, p.th, quad, rel_tol);
    let pieces = k.pieces()?;
    let p1 = pieces.ln_p1.exp();
    let mut pt = p1 + pieces.ln_p2_t.exp();
    let mut pr = p1 + pieces.ln_p2_r.exp();
    let phi = if p.th >= 1.0 {
        let s = k.success_disjoint(&pieces)?;
        // Near one, relative error in P1 is absolute error in the outage;
        // the decoded events are small there and read off accurately.
        let (dt, dr) = s.decoded();
        if pt > 0.5 {
            pt = 1.0 - dt;
        }
        if pr > 0.5 {
            pr = 1.0 - dr;
        }
        s.ln_success().exp()
    } else {
        // Both decoding orders can succeed at once below γ_th = 1.
        1.0 - pt - pr + p1
    };
    Ok((finish(pt, "U_t outage")?, finish(pr, "U_r outage")?, finish(phi, "success probability")?))
}

fn tdma_outage_raw(p: &Prepared) -> (f64, f64) {
    if p.th <= 0.0 {
        return (0.0, 0.0);
    }
    (tails_at(&p.gt, p.th / p.ct).p(), tails_at(&p.gr, p.th / p.cr).p())
}

/// `(P_out,t, P_out,r)` for TEP.
pub fn outage_tep(config: &SystemConfig, policy: &TepPolicy, quad: &QuadratureRule) -> Result<(f64, f64)> {
    outage(config, &Policy::Tep(*policy), quad)
}

/// `(P_out,t, P_out,r)` for EEP.
pub fn outage_eep(config: &SystemConfig, policy: &EepPolicy, quad: &QuadratureRule) -> Result<(f64, f64)> {
    outage(config, &Policy::Eep(*policy), quad)
}

/// `(P_out,t, P_out,r)` for TDMA: each user's own CDF at `γ_th/c_χ`.
pub fn outage_tdma(config: &SystemConfig, policy: &TdmaPolicy) -> Result<(f64, f64)> {
    let p = prepare(config, &Policy::Tdma(*policy))?;
    let (a, b) = tdma_outage_raw(&p);
    Ok((finish(a, "U_t outage")?, finish(b, "U_r outage")?))
}

/// Outage pair for any scheme.
pub fn outage(config: &SystemConfig, policy: &Policy, quad: &QuadratureRule) -> Result<(f64, f64)> {
    let p = prepare(config, policy)?;
    match policy {
        Policy::Tdma(_) => {
            let (a, b) = tdma_outage_raw(&p);
            Ok((finish(a, "U_t outage")?, finish(b, "U_r outage")?))
        }
        _ => noma_eval(&p, quad, DEFAULT_REL_TOL).map(|(a, b, _)| (a, b)),
    }
}

/// Per-user throughput `(R·τ_t(1 − P_t), R·τ_r(1 − P_r))`.
pub fn user_throughput(outage: (f64, f64), rate: f64, policy: &Policy) -> (f64, f64) {
    let (tau_t, tau_r) = policy.uplink_fractions();
    (rate * tau_t * (1.0 - outage.0), rate * tau_r * (1.0 - outage.1))
}

/// Sum throughput of the outage pair under `policy`.
pub fn sum_throughput(outage: (f64, f64), rate: f64, policy: &Policy) -> f64 {
    let (a, b) = user_throughput(outage, rate, policy);
    a + b
}

/// Probability that both users are decoded in a block.
pub fn success_prob(config: &SystemConfig, policy: &Policy, quad: &QuadratureRule) -> Result<f64> {
    let p = prepare(config, policy)?;
    match policy {
        Policy::Tdma(_) => finish(tdma_success(&p), "TDMA success probability"),
        _ => noma_eval(&p, quad, DEFAULT_REL_TOL).map(|(_, _, phi)| phi),
    }
}

/// `Δ = 1/Φ`; `Φ = 0` gives `+∞` (no update is ever delivered).
pub fn average_aoi(phi: f64) -> f64 {
    if phi <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / phi
    }
}

/// All metrics for one scheme.
pub fn evaluate(config: &SystemConfig, policy: &Policy, quad: &QuadratureRule) -> Result<PerfReport> {
    let p = prepare(config, policy)?;
    let (pt, pr, phi) = match policy {
        Policy::Tdma(_) => {
            let (a, b) = tdma_outage_raw(&p);
            (finish(a, "U_t outage")?, finish(b, "U_r outage")?, finish(tdma_success(&p), "TDMA success")?)
        }
        _ => noma_eval(&p, quad, DEFAULT_REL_TOL)?,
    };
    let (tt, tr) = user_throughput((pt, pr), config.rate, policy);
    Ok(PerfReport {
        scheme: policy.scheme(),
        p_out_t: pt,
        p_out_r: pr,
        throughput_t: tt,
        throughput_r: tr,
        sum_throughput: tt + tr,
        success_prob: phi,
        avg_aoi: average_aoi(phi),
    })
}

/// TDMA success: {γ_r > γ_t ≥ γ_th} ∪ {γ_t > γ_r ≥ γ_th}.
///
/// Each piece is `∫_{c}^∞ [F(U·y) − F(c')] f(y) dy`; the lower limit turns
/// the Gamma integral identity into upper incomplete gammas,
/// `∫_{c}^∞ Q(n, θ(Uy)^{1/4}) f(y) dy = Σ_m C(n+m−1, m) s^m/(1+s)^{n+m} Q(n+m, θ(1+s)c^{1/4})`
/// with `s = U^{1/4}`. Needs both users to share one Gamma fit; otherwise
/// the two independent thresholds give the product form directly.
fn tdma_success(p: &Prepared) -> f64 {
    if p.th <= 0.0 {
        return 1.0;
    }
    let c_t = p.th / p.ct;
    let c_r = p.th / p.cr;
    let ft = tails_at(&p.gt, c_t);
    let fr = tails_at(&p.gr, c_r);
    if p.gt != p.gr {
        return (ft.ln_q + fr.ln_q).exp();
    }
    let g = &p.gt;
    let piece = |u: f64, c_lower: f64, f_lower: crate::special::Tails, f_other: crate::special::Tails| {
        // P(c_other < X_other < U·Y, Y > c_lower) with the other user's threshold c_other = U·c_lower.
        let s = u.sqrt().sqrt();
        let n = g.nk_int;
        let y0 = g.theta * (1.0 + s) * c_lower.sqrt().sqrt();
        let terms: Vec<f64> = (0..n)
            .map(|m| {
                let ln_c = ln_factorial(n + m - 1) - ln_factorial(m) - ln_factorial(n - 1);
                ln_c + m as f64 * s.ln() - (n + m) as f64 * (1.0 + s).ln()
                    + crate::special::int_gamma_tails(n + m, y0).ln_q
            })
            .collect();
        let tail_int = ln_sum_exp(&terms).exp();
        f_lower.q() - tail_int - f_other.p() * f_lower.q()
    };
    let u5 = p.cr / p.ct;
    let phi_1 = piece(u5, c_r, fr, ft);
    let phi_2 = piece(1.0 / u5, c_t, ft, fr);
    phi_1 + phi_2
}

/// The finite integral `∫_0^{upper} Q_inner(slope·x + offset) f_outer(x) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualIntegrand {
    /// Distribution whose upper tail is integrated.
    pub inner: GammaApprox,
    /// Distribution of the integration variable.
    pub outer: GammaApprox,
    pub slope: f64,
    pub offset: f64,
}

impl ResidualIntegrand {
    /// The U_t residual of the NOMA outage: `inner` = U_r, `outer` = U_t,
    /// `Q_r(γ_th(c_t x + 1)/c_r)`.
    pub fn for_user_t(config: &SystemConfig, policy: &Policy) -> Result<(Self, f64)> {
        let p = prepare(config, policy)?;
        let integrand =
            Self { inner: p.gr, outer: p.gt, slope: p.th * p.ct / p.cr, offset: p.th / p.cr };
        Ok((integrand, p.th / p.ct))
    }

    /// Integrand value at `x` in the original variable.
    pub fn value(&self, x: f64) -> f64 {
        (self.inner.tails(self.slope * x + self.offset).ln_q + self.outer.ln_pdf(x)).exp()
    }
}

/// Adaptive Gauss-Kronrod evaluation of a [`ResidualIntegrand`].
pub fn residual_integral(integrand: &ResidualIntegrand, upper: f64, rel_tol: f64) -> Result<f64> {
    if !(upper > 0.0) {
        return Err(Error::InvalidParameter(format!("residual upper limit must be positive, got {upper}")));
    }
    let opts = AdaptiveOptions { rel_tol, ..Default::default() };
    let it = *integrand;
    Ok(ln_residual(
        integrand.outer,
        move |x| it.inner.tails(it.slope * x + it.offset).ln_q,
        0.0,
        upper,
        opts,
    )?
    .exp())
}

/// Outcome pieces evaluated with an explicit quadrature rule and tolerance;
/// used by the convergence checks.
pub fn evaluate_with(
    config: &SystemConfig,
    policy: &Policy,
    quad: &QuadratureRule,
    rel_tol: f64,
) -> Result<(f64, f64, f64)> {
    let p = prepare(config, policy)?;
    match policy {
        Policy::Tdma(_) => {
            let (a, b) = tdma_outage_raw(&p);
            Ok((a, b, tdma_success(&p)))
        }
        _ => noma_eval(&p, quad, rel_tol),
    }
}

/// Success probability through the complement identity
/// `Φ = 1 − P_out,t − P_out,r + P(both fail)`, valid for any threshold.
/// An independent route to [`success_prob`] for `γ_th ≥ 1`.
pub fn success_prob_by_complement(config: &SystemConfig, policy: &Policy, quad: &QuadratureRule) -> Result<f64> {
    let p = prepare(config, policy)?;
    if let Policy::Tdma(_) = policy {
        let (a, b) = tdma_outage_raw(&p);
        return Ok((1.0 - a) * (1.0 - b));
    }
    if p.th <= 0.0 {
        return Ok(1.0);
    }
    let k = Noma::new(p.gt, p.gr, p.ct, p.cr, p.th, quad, DEFAULT_REL_TOL);
    let pieces = k.pieces()?;
    let p1 = pieces.ln_p1.exp();
    Ok(1.0 - (p1 + pieces.ln_p2_t.exp()) - (p1 + pieces.ln_p2_r.exp()) + p1)
}
