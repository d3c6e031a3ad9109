//! Slot-level age process against the renewal value `1/Φ`.
//!
//! cargo run --release --example aoi_simulation

use starris::analytics::{average_aoi, success_prob};
use starris::channel::gauss_hermite_rule;
use starris::montecarlo::{aoi_simulate, AoiSource, GainMode};
use starris::system::{EepPolicy, Policy, SystemConfig, TdmaPolicy, TepPolicy};

fn main() -> starris::Result<()> {
    let quad = gauss_hermite_rule(30)?;
    println!("Bernoulli source:");
    for phi in [1.0, 0.5, 0.1] {
        let t = aoi_simulate(AoiSource::Bernoulli(phi), 1_000_000, 3)?;
        println!("  phi {phi}: simulated {:.4}, 1/phi {:.4}", t.average_age, average_aoi(phi));
    }

    println!("Channel source, N = 32, R = 2:");
    let tep = TepPolicy { beta_t: 0.4, beta_r: 0.6, ..Default::default() };
    let eep = EepPolicy { beta_t: 0.4, beta_r: 0.6, ..Default::default() };
    for db in [35.0, 40.0, 45.0] {
        let config = SystemConfig::default().with_elements(32).with_rate(2.0).with_snr_db(db);
        for policy in [Policy::Tep(tep), Policy::Eep(eep), Policy::Tdma(TdmaPolicy::default())] {
            let phi = success_prob(&config, &policy, &quad)?;
            let source = AoiSource::Channel { config, policy, gain_mode: GainMode::IndependentGains };
            let t = aoi_simulate(source, 500_000, 11)?;
            println!(
                "  {db} dB {:<4}: simulated {:>9.4}, analytic {:>9.4}",
                policy.scheme().name(),
                t.average_age,
                average_aoi(phi)
            );
        }
    }
    Ok(())
}
