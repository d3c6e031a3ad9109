//! Gamma fit of the co-phased element sum and how well it describes
//! simulated `|Σ hᵢgᵢ|⁴`.
//!
//! cargo run --release --example channel_statistics

use starris::channel::{cascade_moment, gamma_fit, quartic_gain_cdf, quartic_gain_cdf_series, NakagamiParams};
use starris::montecarlo::{mc_gains, GainMode, McConfig};
use starris::system::SystemConfig;

fn main() -> starris::Result<()> {
    let m2 = NakagamiParams::new(2.0, 1.0)?;
    println!("E[hg] = {:.6}, E[(hg)^2] = {:.6}", cascade_moment(1, m2, m2)?, cascade_moment(2, m2, m2)?);

    for n in [1u32, 5, 30] {
        let g = gamma_fit(m2, m2, n)?;
        let config = SystemConfig::default().with_elements(n);
        let mc = McConfig::new(200_000, 7, GainMode::IndependentGains)?;
        let mut x: Vec<f64> = mc_gains(&config, &mc)?.map(|(gt, _)| gt.powi(4)).collect();
        x.sort_by(f64::total_cmp);

        println!("\nN = {n}: k = {:.4}, theta = {:.4}, N*k = {:.2} (series uses {})", g.k, g.theta, g.nk(), g.nk_int);
        println!("{:>6} {:>14} {:>10} {:>10} {:>10}", "q", "x_q", "empirical", "gamma", "series");
        for q in [0.01, 0.1, 0.5, 0.9, 0.99] {
            let xq = x[(q * x.len() as f64) as usize];
            println!(
                "{q:>6} {xq:>14.4e} {q:>10.4} {:>10.4} {:>10.4}",
                quartic_gain_cdf(&g, xq),
                quartic_gain_cdf_series(&g, xq)
            );
        }
    }
    Ok(())
}
