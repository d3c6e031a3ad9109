//! Simulated outage next to the closed forms, with both gain models.
//! Results depend only on the seed, not on the number of threads.
//!
//! cargo run --release --example monte_carlo_oracle

use starris::analytics::outage;
use starris::channel::gauss_hermite_rule;
use starris::montecarlo::{mc_batch, GainMode, McConfig};
use starris::system::{EepPolicy, Policy, SystemConfig, TdmaPolicy, TepPolicy};

fn main() -> starris::Result<()> {
    let quad = gauss_hermite_rule(30)?;
    let base = SystemConfig::default();
    let points: Vec<(SystemConfig, Policy)> = [20.0, 30.0, 40.0]
        .into_iter()
        .flat_map(|db| {
            [Policy::Tep(TepPolicy::default()), Policy::Eep(EepPolicy::default()), Policy::Tdma(TdmaPolicy::default())]
                .map(|p| (base.with_snr_db(db), p))
        })
        .collect();

    for mode in [GainMode::IndependentGains, GainMode::SharedH] {
        let mc = McConfig::new(1_000_000, 42, mode)?;
        println!("{mode:?}");
        for ((c, p), k) in points.iter().zip(mc_batch(&base, &points, &mc)?) {
            let (at, ar) = outage(c, p, &quad)?;
            let o = k.outage();
            println!(
                "  {:>4} dB {:<4} U_t {at:.3e} vs {:.3e} ± {:.1e}   U_r {ar:.3e} vs {:.3e} ± {:.1e}",
                c.snr_db(),
                p.scheme().name(),
                o.p_t,
                o.se_t,
                o.p_r,
                o.se_r
            );
        }
    }

    let mc = McConfig::new(200_000, 42, GainMode::IndependentGains)?;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let serial = one.install(|| mc_batch(&base, &points, &mc))?;
    println!("one thread == default pool: {}", serial == mc_batch(&base, &points, &mc)?);
    Ok(())
}
