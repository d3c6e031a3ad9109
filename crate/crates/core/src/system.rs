//! Path loss, harvested energy, uplink SNRs and the SIC decoding rule.
//!
//! All three schemes end up with SNRs linear in the quartic gains,
//! `γ_χ = c_χ·G_χ⁴`; [`snr_coefficients`] returns `(c_t, c_r)` and the
//! analytics work from those.

use serde::{Deserialize, Serialize};

use crate::channel::{gamma_fit, GammaApprox, NakagamiParams};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    /// Transmission-side user.
    T,
    /// Reflection-side user.
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    Tep,
    Eep,
    Tdma,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Tep, Scheme::Eep, Scheme::Tdma];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Tep => "TEP",
            Scheme::Eep => "EEP",
            Scheme::Tdma => "TDMA",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fading on the three link families, identical across elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkFading {
    pub ap_ris: NakagamiParams,
    pub ris_t: NakagamiParams,
    pub ris_r: NakagamiParams,
}

impl LinkFading {
    pub fn uniform(p: NakagamiParams) -> Self {
        Self { ap_ris: p, ris_t: p, ris_r: p }
    }

    pub fn user(&self, user: User) -> NakagamiParams {
        match user {
            User::T => self.ris_t,
            User::R => self.ris_r,
        }
    }
}

/// Physical parameters. Block time is normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// AP transmit power (W).
    pub p_ap: f64,
    /// Noise power (W).
    pub n0: f64,
    /// AP–RIS distance (m).
    pub d0: f64,
    /// RIS–U_t distance (m).
    pub d_t: f64,
    /// RIS–U_r distance (m).
    pub d_r: f64,
    /// Path-loss exponents.
    pub pl_exp_0: f64,
    pub pl_exp_t: f64,
    pub pl_exp_r: f64,
    /// STAR-RIS element count.
    pub elements: u32,
    pub fading: LinkFading,
    /// Target rate (bit/s/Hz).
    pub rate: f64,
}

impl Default for SystemConfig {
    /// The evaluation setting used throughout: 1 W, 30/2/4 m, exponents 2,
    /// m = 2 and Ω = 1 everywhere, N = 30, R = 1, 40 dB.
    fn default() -> Self {
        let m2 = NakagamiParams { m: 2.0, omega: 1.0 };
        Self {
            p_ap: 1.0,
            n0: 1e-4,
            d0: 30.0,
            d_t: 2.0,
            d_r: 4.0,
            pl_exp_0: 2.0,
            pl_exp_t: 2.0,
            pl_exp_r: 2.0,
            elements: 30,
            fading: LinkFading::uniform(m2),
            rate: 1.0,
        }
    }
}

impl SystemConfig {
    /// `γ_th = 2^R − 1`.
    pub fn gamma_th(&self) -> f64 {
        self.rate.exp2() - 1.0
    }

    /// `P_AP/N0` in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p_ap / self.n0).log10()
    }

    /// Sets `N0` so that `P_AP/N0` equals `db`.
    pub fn with_snr_db(mut self, db: f64) -> Self {
        self.n0 = self.p_ap.max(f64::MIN_POSITIVE) / 10f64.powf(db / 10.0);
        self
    }

    pub fn with_elements(mut self, n: u32) -> Self {
        self.elements = n;
        self
    }

    pub fn with_rate(mut self, r: f64) -> Self {
        self.rate = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_ap >= 0.0 && self.p_ap.is_finite()) {
            return invalid(format!("P_AP must be non-negative, got {}", self.p_ap));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return invalid(format!("N0 must be positive, got {}", self.n0));
        }
        for (name, d) in [("d0", self.d0), ("d_t", self.d_t), ("d_r", self.d_r)] {
            if !(d > 0.0 && d.is_finite()) {
                return invalid(format!("distance {name} must be positive, got {d}"));
            }
        }
        for (name, e) in [("exp_0", self.pl_exp_0), ("exp_t", self.pl_exp_t), ("exp_r", self.pl_exp_r)] {
            if !(e >= 1.0 && e.is_finite()) {
                return invalid(format!("path-loss exponent {name} must be at least 1, got {e}"));
            }
        }
        if self.elements == 0 {
            return invalid("element count N must be at least 1");
        }
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return invalid(format!("target rate R must be non-negative, got {}", self.rate));
        }
        self.fading.ap_ris.validate()?;
        self.fading.ris_t.validate()?;
        self.fading.ris_r.validate()
    }

    /// Gamma fit of `Σ hᵢ g_{χ,i}`.
    pub fn gamma_approx(&self, user: User) -> Result<GammaApprox> {
        gamma_fit(self.fading.ap_ris, self.fading.user(user), self.elements)
    }

    /// The same system with the two users' geometry and fading exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d_t: self.d_r,
            d_r: self.d_t,
            pl_exp_t: self.pl_exp_r,
            pl_exp_r: self.pl_exp_t,
            fading: LinkFading { ap_ris: self.fading.ap_ris, ris_t: self.fading.ris_r, ris_r: self.fading.ris_t },
            ..*self
        }
    }
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return invalid(format!("{name} must lie strictly inside (0, 1), got {v}"));
    }
    Ok(())
}

fn check_sum(what: &str, s: f64, want: f64) -> Result<()> {
    if (s - want).abs() > 1e-9 {
        return invalid(format!("{what} must sum to {want}, got {s}"));
    }
    Ok(())
}

/// Time-switching downlink, energy-splitting uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TepPolicy {
    pub alpha_t: f64,
    pub alpha_r: f64,
    pub alpha_ap: f64,
    pub beta_t: f64,
    pub beta_r: f64,
}

impl Default for TepPolicy {
    fn default() -> Self {
        Self { alpha_t: 0.25, alpha_r: 0.25, alpha_ap: 0.5, beta_t: 0.6, beta_r: 0.4 }
    }
}

impl TepPolicy {
    /// Symmetric downlink split `α_t = α_r = (1 − α_AP)/2`.
    pub fn symmetric(alpha_ap: f64, beta_r: f64) -> Self {
        let side = 0.5 * (1.0 - alpha_ap);
        Self { alpha_t: side, alpha_r: side, alpha_ap, beta_t: 1.0 - beta_r, beta_r }
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction("alpha_t", self.alpha_t)?;
        check_fraction("alpha_r", self.alpha_r)?;
        check_fraction("alpha_ap", self.alpha_ap)?;
        check_fraction("beta_t", self.beta_t)?;
        check_fraction("beta_r", self.beta_r)?;
        check_sum("alpha_t + alpha_r + alpha_ap", self.alpha_t + self.alpha_r + self.alpha_ap, 1.0)?;
        check_sum("beta_t + beta_r", self.beta_t + self.beta_r, 1.0)
    }

    pub fn swapped(&self) -> Self {
        Self { alpha_t: self.alpha_r, alpha_r: self.alpha_t, beta_t: self.beta_r, beta_r: self.beta_t, ..*self }
    }
}

/// Energy splitting in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EepPolicy {
    pub alpha_et: f64,
    pub alpha_it: f64,
    pub beta_t: f64,
    pub beta_r: f64,
}

impl Default for EepPolicy {
    fn default() -> Self {
        Self { alpha_et: 0.5, alpha_it: 0.5, beta_t: 0.6, beta_r: 0.4 }
    }
}

impl EepPolicy {
    pub fn from_split(alpha_et: f64, beta_r: f64) -> Self {
        Self { alpha_et, alpha_it: 1.0 - alpha_et, beta_t: 1.0 - beta_r, beta_r }
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction("alpha_et", self.alpha_et)?;
        check_fraction("alpha_it", self.alpha_it)?;
        check_fraction("beta_t", self.beta_t)?;
        check_fraction("beta_r", self.beta_r)?;
        check_sum("alpha_et + alpha_it", self.alpha_et + self.alpha_it, 1.0)?;
        check_sum("beta_t + beta_r", self.beta_t + self.beta_r, 1.0)
    }

    pub fn swapped(&self) -> Self {
        Self { beta_t: self.beta_r, beta_r: self.beta_t, ..*self }
    }
}

/// Orthogonal uplink: each user transmits alone in its own slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TdmaPolicy {
    pub alpha_t: f64,
    pub alpha_r: f64,
    pub alpha_ap_t: f64,
    pub alpha_ap_r: f64,
}

impl Default for TdmaPolicy {
    /// Same downlink as TEP; the uplink half-block is split evenly.
    fn default() -> Self {
        Self { alpha_t: 0.25, alpha_r: 0.25, alpha_ap_t: 0.25, alpha_ap_r: 0.25 }
    }
}

impl TdmaPolicy {
    /// Total uplink fraction `alpha`, split evenly in both phases.
    pub fn symmetric(alpha: f64) -> Self {
        let down = 0.5 * (1.0 - alpha);
        Self { alpha_t: down, alpha_r: down, alpha_ap_t: 0.5 * alpha, alpha_ap_r: 0.5 * alpha }
    }

    pub fn validate(&self) -> Result<()> {
        check_fraction("alpha_t", self.alpha_t)?;
        check_fraction("alpha_r", self.alpha_r)?;
        check_fraction("alpha_ap_t", self.alpha_ap_t)?;
        check_fraction("alpha_ap_r", self.alpha_ap_r)?;
        check_sum(
            "alpha_t + alpha_r + alpha_ap_t + alpha_ap_r",
            self.alpha_t + self.alpha_r + self.alpha_ap_t + self.alpha_ap_r,
            1.0,
        )
    }

    pub fn swapped(&self) -> Self {
        Self { alpha_t: self.alpha_r, alpha_r: self.alpha_t, alpha_ap_t: self.alpha_ap_r, alpha_ap_r: self.alpha_ap_t }
    }
}

/// A scheme together with its allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    Tep(TepPolicy),
    Eep(EepPolicy),
    Tdma(TdmaPolicy),
}

impl Policy {
    pub fn scheme(&self) -> Scheme {
        match self {
            Policy::Tep(_) => Scheme::Tep,
            Policy::Eep(_) => Scheme::Eep,
            Policy::Tdma(_) => Scheme::Tdma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Policy::Tep(p) => p.validate(),
            Policy::Eep(p) => p.validate(),
            Policy::Tdma(p) => p.validate(),
        }
    }

    pub fn swapped(&self) -> Self {
        match self {
            Policy::Tep(p) => Policy::Tep(p.swapped()),
            Policy::Eep(p) => Policy::Eep(p.swapped()),
            Policy::Tdma(p) => Policy::Tdma(p.swapped()),
        }
    }

    /// Uplink (information) time of each user: `(τ_t, τ_r)`.
    pub fn uplink_fractions(&self) -> (f64, f64) {
        match self {
            Policy::Tep(p) => (p.alpha_ap, p.alpha_ap),
            Policy::Eep(p) => (p.alpha_it, p.alpha_it),
            Policy::Tdma(p) => (p.alpha_ap_t, p.alpha_ap_r),
        }
    }
}

/// `l_χ = 1/(d0^{ϑ0}·d_χ^{ϑ_χ})`.
pub fn pathloss(config: &SystemConfig, user: User) -> f64 {
    let (d, e) = match user {
        User::T => (config.d_t, config.pl_exp_t),
        User::R => (config.d_r, config.pl_exp_r),
    };
    1.0 / (config.d0.powf(config.pl_exp_0) * d.powf(e))
}

/// Downlink energy `(X_t, X_r)` for amplitude sums `g_t`, `g_r`.
///
/// TDMA harvests exactly as TEP does.
pub fn harvested_energy(policy: &Policy, config: &SystemConfig, g_t: f64, g_r: f64) -> (f64, f64) {
    let lt = pathloss(config, User::T);
    let lr = pathloss(config, User::R);
    let p = config.p_ap;
    match policy {
        Policy::Tep(q) => (p * lt * g_t * g_t * q.alpha_t, p * lr * g_r * g_r * q.alpha_r),
        Policy::Tdma(q) => (p * lt * g_t * g_t * q.alpha_t, p * lr * g_r * g_r * q.alpha_r),
        Policy::Eep(q) => (p * lt * q.beta_t * g_t * g_t * q.alpha_et, p * lr * q.beta_r * g_r * g_r * q.alpha_et),
    }
}

/// `(c_t, c_r)` with `γ_χ = c_χ·G_χ⁴`.
pub fn snr_coefficients(policy: &Policy, config: &SystemConfig) -> (f64, f64) {
    let lt = pathloss(config, User::T);
    let lr = pathloss(config, User::R);
    let (p, n0) = (config.p_ap, config.n0);
    match policy {
        Policy::Tep(q) => (
            p * lt * lt * q.beta_t * q.alpha_t / (q.alpha_ap * n0),
            p * lr * lr * q.beta_r * q.alpha_r / (q.alpha_ap * n0),
        ),
        Policy::Eep(q) => (
            p * lt * lt * q.beta_t * q.beta_t * q.alpha_et / (q.alpha_it * n0),
            p * lr * lr * q.beta_r * q.beta_r * q.alpha_et / (q.alpha_it * n0),
        ),
        Policy::Tdma(q) => (
            p * lt * lt * q.alpha_t / (q.alpha_ap_t * n0),
            p * lr * lr * q.alpha_r / (q.alpha_ap_r * n0),
        ),
    }
}

/// Received SNRs `(γ_t, γ_r)` for amplitude sums `g_t`, `g_r`.
pub fn uplink_snrs(policy: &Policy, config: &SystemConfig, g_t: f64, g_r: f64) -> (f64, f64) {
    let (ct, cr) = snr_coefficients(policy, config);
    (ct * g_t.powi(4), cr * g_r.powi(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    TFirst,
    RFirst,
}

/// SIC decoding order. `ambiguous` marks the fall-through branch where the
/// rule does not single out an order (neither or both cross-SINRs clear
/// the threshold); `TFirst` is returned there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOrder {
    pub order: Order,
    pub ambiguous: bool,
}

pub fn decode_order(gamma_t: f64, gamma_r: f64, gamma_th: f64) -> DecodeOrder {
    let t_ok = gamma_t / (gamma_r + 1.0) >= gamma_th;
    let r_ok = gamma_r / (gamma_t + 1.0) >= gamma_th;
    match (t_ok, r_ok) {
        (true, false) => DecodeOrder { order: Order::TFirst, ambiguous: false },
        (false, true) => DecodeOrder { order: Order::RFirst, ambiguous: false },
        _ => DecodeOrder { order: Order::TFirst, ambiguous: true },
    }
}

/// `(t_decoded, r_decoded)` under SIC.
///
/// U_t fails when neither user can be decoded first, or when U_r is decoded
/// first and U_t then falls short on its own; U_r mirrors this.
#[inline]
pub fn sic_outcome(gamma_t: f64, gamma_r: f64, gamma_th: f64) -> (bool, bool) {
    let t_first = gamma_t / (gamma_r + 1.0) >= gamma_th;
    let r_first = gamma_r / (gamma_t + 1.0) >= gamma_th;
    let neither = !t_first && !r_first;
    let t_fail = neither || (gamma_t < gamma_th && r_first);
    let r_fail = neither || (gamma_r < gamma_th && t_first);
    (!t_fail, !r_fail)
}

/// TDMA: each user only has to clear the threshold alone.
#[inline]
pub fn tdma_outcome(gamma_t: f64, gamma_r: f64, gamma_th: f64) -> (bool, bool) {
    (gamma_t >= gamma_th, gamma_r >= gamma_th)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pathloss_values() {
        let c = SystemConfig::default();
        assert!((pathloss(&c, User::T) - 1.0 / 3600.0).abs() < 1e-18);
        assert!((pathloss(&c, User::R) - 1.0 / 14400.0).abs() < 1e-18);
        let unit = SystemConfig { d0: 1.0, d_t: 1.0, pl_exp_0: 3.3, pl_exp_t: 2.7, ..c };
        assert_eq!(pathloss(&unit, User::T), 1.0);
    }

    fn unit_config() -> SystemConfig {
        SystemConfig { p_ap: 1.0, n0: 1.0, d0: 1.0, d_t: 1.0, d_r: 1.0, ..SystemConfig::default() }
    }

    #[test]
    fn energy_examples() {
        let c = unit_config();
        let tep = Policy::Tep(TepPolicy { alpha_t: 0.5, alpha_r: 0.25, alpha_ap: 0.25, beta_t: 0.5, beta_r: 0.5 });
        assert_eq!(harvested_energy(&tep, &c, 1.0, 1.0).0, 0.5);
        assert_eq!(harvested_energy(&tep, &c, 0.0, 1.0).0, 0.0);
        let e6 = Policy::Eep(EepPolicy { beta_t: 0.6, beta_r: 0.4, ..Default::default() });
        let e3 = Policy::Eep(EepPolicy { beta_t: 0.3, beta_r: 0.7, ..Default::default() });
        let x6 = harvested_energy(&e6, &c, 1.3, 1.0).0;
        let x3 = harvested_energy(&e3, &c, 1.3, 1.0).0;
        assert!((x3 - x6 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn snr_examples() {
        let c = unit_config();
        let tep = Policy::Tep(TepPolicy { alpha_t: 0.4, alpha_r: 0.2, alpha_ap: 0.4, beta_t: 0.999_999, beta_r: 1e-6 });
        let (gt, _) = uplink_snrs(&tep, &c, 1.0, 1.0);
        assert!((gt - 0.999_999).abs() < 1e-12);
        let e1 = Policy::Eep(EepPolicy { beta_t: 0.2, beta_r: 0.8, ..Default::default() });
        let e2 = Policy::Eep(EepPolicy { beta_t: 0.4, beta_r: 0.6, ..Default::default() });
        let r = uplink_snrs(&e2, &c, 1.1, 1.0).0 / uplink_snrs(&e1, &c, 1.1, 1.0).0;
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn snr_matches_hand_evaluation_at_40db() {
        let c = SystemConfig::default().with_snr_db(40.0);
        let g = c.gamma_approx(User::T).unwrap();
        // E[G⁴] under Gamma(nk, θ): nk(nk+1)(nk+2)(nk+3)/θ⁴
        let n = g.nk();
        let mean_x = n * (n + 1.0) * (n + 2.0) * (n + 3.0) / g.theta.powi(4);
        let gt = uplink_snrs(&Policy::Tep(TepPolicy::default()), &c, mean_x.powf(0.25), 1.0).0;
        let hand = 1.0 * (1.0 / 3600f64).powi(2) * 0.6 * mean_x * 0.25 / (0.5 * 1e-4);
        assert!(((gt - hand) / hand).abs() < 1e-12, "{gt} vs {hand}");
    }

    #[test]
    fn decode_order_examples() {
        assert_eq!(decode_order(10.0, 1.0, 1.0), DecodeOrder { order: Order::TFirst, ambiguous: false });
        assert_eq!(decode_order(1.0, 10.0, 1.0), DecodeOrder { order: Order::RFirst, ambiguous: false });
        assert_eq!(decode_order(0.1, 0.1, 1.0), DecodeOrder { order: Order::TFirst, ambiguous: true });
    }

    #[test]
    fn sic_examples() {
        assert_eq!(sic_outcome(10.0, 2.0, 1.0), (true, true));
        assert_eq!(sic_outcome(0.5, 10.0, 1.0), (false, true));
        assert_eq!(sic_outcome(0.0, 0.0, 1.0), (false, false));
    }

    #[test]
    fn policy_validation() {
        assert!(TepPolicy::default().validate().is_ok());
        assert!(TepPolicy { alpha_ap: 0.6, ..Default::default() }.validate().is_err());
        assert!(EepPolicy { beta_r: 0.5, ..Default::default() }.validate().is_err());
        assert!(TdmaPolicy::default().validate().is_ok());
        assert!(TdmaPolicy { alpha_ap_t: 0.3, ..Default::default() }.validate().is_err());
        assert!(SystemConfig { d0: 0.0, ..Default::default() }.validate().is_err());
        assert!(SystemConfig { pl_exp_t: 0.5, ..Default::default() }.validate().is_err());
    }
}
