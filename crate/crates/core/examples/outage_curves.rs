//! Closed-form outage, throughput and AoI for the three schemes across SNR.
//!
//! cargo run --release --example outage_curves

use starris::analytics::{evaluate, DEFAULT_ORDER};
use starris::channel::gauss_hermite_rule;
use starris::system::{EepPolicy, Policy, SystemConfig, TdmaPolicy, TepPolicy};

fn main() -> starris::Result<()> {
    let quad = gauss_hermite_rule(DEFAULT_ORDER)?;
    let schemes = [Policy::Tep(TepPolicy::default()), Policy::Eep(EepPolicy::default()), Policy::Tdma(TdmaPolicy::default())];
    for rate in [1.0, 2.0] {
        println!("R = {rate}");
        println!("{:>5} {:>5} {:>11} {:>11} {:>9} {:>10}", "dB", "", "p_out_t", "p_out_r", "sum thr", "AoI");
        for db in (20..=50).step_by(5) {
            let config = SystemConfig::default().with_snr_db(db as f64).with_rate(rate);
            for p in &schemes {
                let r = evaluate(&config, p, &quad)?;
                println!(
                    "{db:>5} {:>5} {:>11.3e} {:>11.3e} {:>9.4} {:>10.3e}",
                    r.scheme.name(),
                    r.p_out_t,
                    r.p_out_r,
                    r.sum_throughput,
                    r.avg_aoi
                );
            }
        }
    }
    Ok(())
}
