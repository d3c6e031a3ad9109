use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Nakagami-m fading magnitude parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NakagamiParams {
    /// Shape `m`.
    pub m: f64,
    /// Spread `Ω = E[X²]`.
    pub omega: f64,
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        let p = Self { m, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return invalid(format!("Nakagami shape m must be positive, got {}", self.m));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return invalid(format!("Nakagami spread Ω must be positive, got {}", self.omega));
        }
        Ok(())
    }

    /// `E[X] = Γ(m+½)/Γ(m)·√(Ω/m)`.
    pub fn mean(&self) -> f64 {
        use crate::special::ln_gamma;
        (ln_gamma(self.m + 0.5) - ln_gamma(self.m)).exp() * (self.omega / self.m).sqrt()
    }
}

/// Draws Nakagami magnitudes as `√Y` with `Y ~ Gamma(m, Ω/m)`.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiSampler {
    power: Gamma<f64>,
}

impl NakagamiSampler {
    pub fn new(params: NakagamiParams) -> Result<Self> {
        params.validate()?;
        let power = Gamma::new(params.m, params.omega / params.m)
            .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
        Ok(Self { power })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng).sqrt()
    }
}

/// `count` i.i.d. Nakagami draws from a ChaCha8 stream seeded with `seed`.
pub fn nakagami_sample(params: NakagamiParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return invalid("sample count must be at least 1");
    }
    let sampler = NakagamiSampler::new(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_power_is_omega() {
        let p = NakagamiParams::new(1.0, 1.0).unwrap();
        let xs = nakagami_sample(p, 1_000_000, 7).unwrap();
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((m2 - 1.0).abs() < 0.01, "{m2}");
    }

    #[test]
    fn m2_mean_matches_closed_form() {
        let p = NakagamiParams::new(2.0, 1.0).unwrap();
        // Γ(2.5)/(Γ(2)·√2) = 0.75·√π/√2
        let want = 0.75 * std::f64::consts::PI.sqrt() / 2f64.sqrt();
        assert!((p.mean() - want).abs() < 1e-14);
        let xs = nakagami_sample(p, 1_000_000, 11).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.9400).abs() < 0.005, "{mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let p = NakagamiParams::new(3.3, 0.7).unwrap();
        let a = nakagami_sample(p, 1, 42).unwrap();
        let b = nakagami_sample(p, 1, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(NakagamiParams::new(0.0, 1.0).is_err());
        assert!(NakagamiParams::new(1.0, -1.0).is_err());
        let bad = NakagamiParams { m: -1.0, omega: 1.0 };
        assert!(nakagami_sample(bad, 10, 0).is_err());
        assert!(nakagami_sample(NakagamiParams { m: 1.0, omega: 1.0 }, 0, 0).is_err());
    }
}
