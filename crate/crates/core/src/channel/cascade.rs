//! Moments of the cascaded magnitude `h·g` and the Gamma fit of the
//! element sum `G = Σ hᵢgᵢ`.
//!
//! `G` is approximated as Gamma(N·k, rate θ), so `X = G⁴` has
//! `F(x) = P(N·k, θ·x^{1/4})`. Series forms use the rounded shape `nk_int`.

use serde::{Deserialize, Serialize};

use super::NakagamiParams;
use crate::error::{invalid, Result};
use crate::special::{gamma_p, int_gamma_tails, ln_factorial, ln_gamma, Tails};

/// `E[(h·g)^n]` for independent Nakagami magnitudes `h`, `g`.
pub fn cascade_moment(n: u32, link1: NakagamiParams, link2: NakagamiParams) -> Result<f64> {
    link1.validate()?;
    link2.validate()?;
    let half = n as f64 / 2.0;
    let ln_lambda = 0.5 * ((link1.m * link2.m) / (link1.omega * link2.omega)).ln();
    let ln_mu = -(n as f64) * ln_lambda + ln_gamma(link1.m + half) + ln_gamma(link2.m + half)
        - ln_gamma(link1.m)
        - ln_gamma(link2.m);
    Ok(ln_mu.exp())
}

/// Gamma(N·k, θ) approximation of the co-phased element sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaApprox {
    /// Per-element shape `k`.
    pub k: f64,
    /// Rate `θ`.
    pub theta: f64,
    /// Element count `N`.
    pub n_elements: u32,
    /// `round(N·k)`, at least 1.
    pub nk_int: u32,
}

/// Moment-matched Gamma fit for `N` independent cascaded elements.
pub fn gamma_fit(link1: NakagamiParams, link2: NakagamiParams, n_elements: u32) -> Result<GammaApprox> {
    if n_elements == 0 {
        return invalid("element count N must be at least 1");
    }
    let mu1 = cascade_moment(1, link1, link2)?;
    // μ(2) = Ω₁Ω₂ exactly.
    let mu2 = link1.omega * link2.omega;
    let var = mu2 - mu1 * mu1;
    if !(var > 0.0) {
        return invalid("degenerate cascade: zero variance (μ(2) = μ(1)²)");
    }
    let k = mu1 * mu1 / var;
    let theta = mu1 / var;
    let nk_int = ((n_elements as f64 * k).round() as u32).max(1);
    Ok(GammaApprox { k, theta, n_elements, nk_int })
}

impl GammaApprox {
    /// Continuous shape `N·k`.
    pub fn nk(&self) -> f64 {
        self.n_elements as f64 * self.k
    }

    /// Both CDF tails of `X = G⁴` at `x`, using `nk_int`.
    #[inline]
    pub fn tails(&self, x: f64) -> Tails {
        int_gamma_tails(self.nk_int, self.theta * x.max(0.0).sqrt().sqrt())
    }

    /// `ln f(x)` of `X = G⁴` with shape `nk_int`.
    #[inline]
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let n = self.nk_int as f64;
        n * self.theta.ln() - self.theta * x.sqrt().sqrt() + (n - 4.0) / 4.0 * x.ln()
            - 4f64.ln()
            - ln_factorial(self.nk_int - 1)
    }

    /// `ln` density of the amplitude `G = X^{1/4}` at `v`, shape `nk_int`.
    #[inline]
    pub fn ln_amp_pdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return if self.nk_int == 1 { self.theta.ln() } else { f64::NEG_INFINITY };
        }
        let n = self.nk_int as f64;
        n * self.theta.ln() + (n - 1.0) * v.ln() - self.theta * v - ln_factorial(self.nk_int - 1)
    }

    /// Amplitudes `(v_lo, v_hi)` with `P(G < v_lo) ≤ eps` and `P(G > v_hi) ≤ eps`.
    pub fn amp_bounds(&self, eps: f64) -> (f64, f64) {
        let n = self.nk_int as f64;
        let ln_eps = eps.ln();
        // P(n, y) ≤ yⁿ/n!
        let y_lo = ((ln_eps + ln_factorial(self.nk_int)) / n).exp();
        // Q(n, y) ≤ 2·e^{-y}y^{n-1}/(n-1)! once y ≥ 2n; fixed-point iterate.
        let mut y_hi = (2.0 * n).max(-ln_eps);
        for _ in 0..200 {
            let next = -ln_eps + 2f64.ln() + (n - 1.0) * y_hi.ln() - ln_factorial(self.nk_int - 1);
            let next = next.max(2.0 * n);
            if (next - y_hi).abs() < 1e-12 * y_hi {
                y_hi = next;
                break;
            }
            y_hi = next;
        }
        (y_lo / self.theta, y_hi / self.theta)
    }

    /// Quartic-gain bounds `(x_lo, x_hi)` matching [`Self::amp_bounds`].
    pub fn quartic_bounds(&self, eps: f64) -> (f64, f64) {
        let (lo, hi) = self.amp_bounds(eps);
        (lo.powi(4), hi.powi(4))
    }
}

/// `P(G⁴ ≤ x)` via the continuous regularized incomplete gamma with shape `N·k`.
pub fn quartic_gain_cdf(g: &GammaApprox, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(g.nk(), g.theta * x.sqrt().sqrt())
}

/// Finite-series form of the same CDF with the rounded shape `nk_int`.
pub fn quartic_gain_cdf_series(g: &GammaApprox, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    g.tails(x).p()
}

/// Density of `G⁴` with shape `nk_int`.
pub fn quartic_gain_pdf(g: &GammaApprox, x: f64) -> f64 {
    g.ln_pdf(x).exp()
}
