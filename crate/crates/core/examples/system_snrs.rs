//! Path loss, harvested energy, uplink SNRs and the SIC decision for one
//! channel realization.
//!
//! cargo run --release --example system_snrs

use starris::system::{
    decode_order, harvested_energy, pathloss, sic_outcome, tdma_outcome, uplink_snrs, EepPolicy, Policy, SystemConfig,
    TdmaPolicy, TepPolicy, User,
};

fn main() {
    let config = SystemConfig::default().with_snr_db(40.0);
    println!("l_t = {:.4e}, l_r = {:.4e}, gamma_th = {}", pathloss(&config, User::T), pathloss(&config, User::R), config.gamma_th());

    // Amplitude sums near their typical values at N = 30.
    let (gt, gr) = (26.5, 26.5);
    for policy in [Policy::Tep(TepPolicy::default()), Policy::Eep(EepPolicy::default()), Policy::Tdma(TdmaPolicy::default())] {
        let (xt, xr) = harvested_energy(&policy, &config, gt, gr);
        let (st, sr) = uplink_snrs(&policy, &config, gt, gr);
        let th = config.gamma_th();
        let decoded = match policy {
            Policy::Tdma(_) => tdma_outcome(st, sr, th),
            _ => sic_outcome(st, sr, th),
        };
        println!(
            "{:<4} energy ({xt:.3e}, {xr:.3e}) J  snr ({st:.2}, {sr:.2})  order {:?}  decoded {decoded:?}",
            policy.scheme().name(),
            decode_order(st, sr, th).order
        );
    }
}
