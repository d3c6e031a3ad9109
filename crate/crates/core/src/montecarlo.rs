//! Monte Carlo oracle for the closed forms, and a slot-level AoI simulator.
//!
//! Trials are split into chunks of [`CHUNK`] draws. Chunk `c` uses
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so a chunk's draws do
//! not depend on which thread runs it. Counters are integers and are summed
//! in chunk order, which makes every estimate bit-identical for any thread
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::NakagamiSampler;
use crate::error::{invalid, Result};
use crate::system::{sic_outcome, snr_coefficients, tdma_outcome, Policy, SystemConfig};

/// Draws per chunk.
pub const CHUNK: u64 = 1 << 16;

/// Whether `G_t` and `G_r` share the AP–RIS fades `hᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GainMode {
    /// One `h` vector per trial feeds both sums (the physical model).
    SharedH,
    /// Each user gets its own `h` vector, so the sums are independent as
    /// the closed forms assume.
    #[default]
    IndependentGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub gain_mode: GainMode,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, gain_mode: GainMode) -> Result<Self> {
        let c = Self { trials, seed, gain_mode };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("Monte Carlo trial count must be at least 1");
        }
        Ok(())
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> {
        let trials = self.trials;
        let n = trials.div_ceil(CHUNK) as usize;
        (0..n).into_par_iter().map(move |c| {
            let c = c as u64;
            (c, CHUNK.min(trials - c * CHUNK))
        })
    }
}

/// The RNG of chunk `chunk` under `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Samples the co-phased amplitude sums `(G_t, G_r)`.
#[derive(Debug, Clone)]
pub struct GainSampler {
    h: NakagamiSampler,
    gt: NakagamiSampler,
    gr: NakagamiSampler,
    elements: u32,
    mode: GainMode,
}

impl GainSampler {
    pub fn new(config: &SystemConfig, mode: GainMode) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            h: NakagamiSampler::new(config.fading.ap_ris)?,
            gt: NakagamiSampler::new(config.fading.ris_t)?,
            gr: NakagamiSampler::new(config.fading.ris_r)?,
            elements: config.elements,
            mode,
        })
    }

    #[inline]
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (mut st, mut sr) = (0.0, 0.0);
        for _ in 0..self.elements {
            let h = self.h.sample(rng);
            let h_r = match self.mode {
                GainMode::SharedH => h,
                GainMode::IndependentGains => self.h.sample(rng),
            };
            st += h * self.gt.sample(rng);
            sr += h_r * self.gr.sample(rng);
        }
        (st, sr)
    }
}

/// Serial iterator over the same `(G_t, G_r)` sequence the parallel
/// estimators consume.
pub struct GainStream {
    sampler: GainSampler,
    seed: u64,
    remaining: u64,
    chunk: u64,
    left_in_chunk: u64,
    rng: ChaCha8Rng,
}

impl Iterator for GainStream {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        if self.left_in_chunk == 0 {
            self.chunk += 1;
            self.rng = chunk_rng(self.seed, self.chunk);
            self.left_in_chunk = CHUNK;
        }
        self.remaining -= 1;
        self.left_in_chunk -= 1;
        Some(self.sampler.draw(&mut self.rng))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

/// `mc.trials` draws of `(G_t, G_r)`.
pub fn mc_gains(config: &SystemConfig, mc: &McConfig) -> Result<GainStream> {
    mc.validate()?;
    Ok(GainStream {
        sampler: GainSampler::new(config, mc.gain_mode)?,
        seed: mc.seed,
        remaining: mc.trials,
        chunk: 0,
        left_in_chunk: CHUNK,
        rng: chunk_rng(mc.seed, 0),
    })
}

/// Raw event counts for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct McCounts {
    pub trials: u64,
    pub fail_t: u64,
    pub fail_r: u64,
    /// Both users decoded.
    pub success: u64,
}

impl McCounts {
    fn add(mut self, o: Self) -> Self {
        self.trials += o.trials;
        self.fail_t += o.fail_t;
        self.fail_r += o.fail_r;
        self.success += o.success;
        self
    }

    pub fn outage(&self) -> McOutage {
        let (p_t, se_t) = binomial(self.fail_t, self.trials);
        let (p_r, se_r) = binomial(self.fail_r, self.trials);
        McOutage { p_t, p_r, se_t, se_r, trials: self.trials }
    }

    pub fn success(&self) -> McSuccess {
        let (phi, se) = binomial(self.success, self.trials);
        McSuccess { phi, se, trials: self.trials }
    }
}

fn binomial(k: u64, n: u64) -> (f64, f64) {
    let p = k as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOutage {
    pub p_t: f64,
    pub p_r: f64,
    pub se_t: f64,
    pub se_r: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSuccess {
    pub phi: f64,
    pub se: f64,
    pub trials: u64,
}

/// One operating point in a batch: the SNR coefficients and threshold that
/// turn a gain draw into an outcome.
#[derive(Debug, Clone, Copy)]
struct Probe {
    ct: f64,
    cr: f64,
    th: f64,
    tdma: bool,
}

impl Probe {
    fn new(config: &SystemConfig, policy: &Policy) -> Result<Self> {
        config.validate()?;
        policy.validate()?;
        let (ct, cr) = snr_coefficients(policy, config);
        Ok(Self { ct, cr, th: config.gamma_th(), tdma: matches!(policy, Policy::Tdma(_)) })
    }

    #[inline]
    fn outcome(&self, gt: f64, gr: f64) -> (bool, bool) {
        let (a, b) = (self.ct * gt.powi(4), self.cr * gr.powi(4));
        if self.tdma {
            tdma_outcome(a, b, self.th)
        } else {
            sic_outcome(a, b, self.th)
        }
    }
}

/// Evaluates many operating points on one shared gain stream.
///
/// All points must share the element count and fading, which is all the
/// gain distribution depends on; SNR, rate and policy may differ. Using
/// common draws keeps comparisons between points free of sampling noise in
/// the gains themselves.
pub fn mc_batch(config: &SystemConfig, points: &[(SystemConfig, Policy)], mc: &McConfig) -> Result<Vec<McCounts>> {
    mc.validate()?;
    for (c, _) in points {
        if c.elements != config.elements || c.fading != config.fading {
            return invalid("batch points must share the element count and fading of the base configuration");
        }
    }
    let probes = points.iter().map(|(c, p)| Probe::new(c, p)).collect::<Result<Vec<_>>>()?;
    let sampler = GainSampler::new(config, mc.gain_mode)?;
    let per_chunk: Vec<Vec<McCounts>> = mc
        .chunks()
        .map(|(c, len)| {
            let mut rng = chunk_rng(mc.seed, c);
            let mut counts = vec![McCounts::default(); probes.len()];
            for _ in 0..len {
                let (gt, gr) = sampler.draw(&mut rng);
                for (k, p) in counts.iter_mut().zip(&probes) {
                    let (t, r) = p.outcome(gt, gr);
                    k.trials += 1;
                    k.fail_t += !t as u64;
                    k.fail_r += !r as u64;
                    k.success += (t && r) as u64;
                }
            }
            counts
        })
        .collect();
    let mut total = vec![McCounts::default(); probes.len()];
    for chunk in per_chunk {
        for (t, c) in total.iter_mut().zip(chunk) {
            *t = t.add(c);
        }
    }
    Ok(total)
}

/// Empirical per-user outage with binomial standard errors.
pub fn mc_outage(config: &SystemConfig, policy: &Policy, mc: &McConfig) -> Result<McOutage> {
    Ok(mc_batch(config, &[(*config, *policy)], mc)?[0].outage())
}

/// Empirical probability that both users are decoded.
pub fn mc_success(config: &SystemConfig, policy: &Policy, mc: &McConfig) -> Result<McSuccess> {
    Ok(mc_batch(config, &[(*config, *policy)], mc)?[0].success())
}

/// Where the per-slot success events come from.
#[derive(Debug, Clone, Copy)]
pub enum AoiSource {
    /// I.i.d. Bernoulli(Φ) slots.
    Bernoulli(f64),
    /// A fresh channel realization per slot, decoded with the scheme's rule.
    Channel { config: SystemConfig, policy: Policy, gain_mode: GainMode },
}

/// Time-average of the age process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoiTrace {
    pub slots: u64,
    pub successes: u64,
    pub average_age: f64,
}

/// Simulates `Δ`: starts at 1, grows by one per slot and drops back to 1 in
/// any slot that delivers both users' updates.
pub fn aoi_simulate(source: AoiSource, slots: u64, seed: u64) -> Result<AoiTrace> {
    if slots == 0 {
        return invalid("AoI simulation needs at least one slot");
    }
    let mut rng = chunk_rng(seed, 0);
    let mut event: Box<dyn FnMut(&mut ChaCha8Rng) -> bool> = match source {
        AoiSource::Bernoulli(phi) => {
            if !(0.0..=1.0).contains(&phi) {
                return invalid(format!("success probability must lie in [0, 1], got {phi}"));
            }
            Box::new(move |r: &mut ChaCha8Rng| rand::Rng::random::<f64>(r) < phi)
        }
        AoiSource::Channel { config, policy, gain_mode } => {
            let probe = Probe::new(&config, &policy)?;
            let sampler = GainSampler::new(&config, gain_mode)?;
            Box::new(move |r: &mut ChaCha8Rng| {
                let (gt, gr) = sampler.draw(r);
                let (t, rr) = probe.outcome(gt, gr);
                t && rr
            })
        }
    };
    let mut age: u64 = 1;
    let mut area: u128 = 0;
    let mut successes = 0;
    for _ in 0..slots {
        if event(&mut rng) {
            age = 1;
            successes += 1;
        } else {
            age += 1;
        }
        area += age as u128;
    }
    Ok(AoiTrace { slots, successes, average_age: area as f64 / slots as f64 })
}
