//! GA-TAPA for both problems at one element count, next to the fixed split
//! and an exhaustive grid.
//!
//! cargo run --release --example ga_tapa

use starris::channel::gauss_hermite_rule;
use starris::optimizer::{assess, baseline, ga_run, grid_search, Allocation, GaConfig, Problem};
use starris::system::SystemConfig;

fn main() -> starris::Result<()> {
    let quad = gauss_hermite_rule(30)?;
    let config = SystemConfig::default().with_snr_db(35.0).with_rate(2.0).with_elements(30);
    let (threshold, ga) = (10.0, GaConfig::default());

    for problem in [Problem::P1, Problem::P2] {
        let r = ga_run(problem, &config, threshold, &ga, &quad)?;
        let b = assess(&baseline(problem), &config, threshold, ga.penalty, &quad)?;
        println!("{problem:?}: {:?}", r.best);
        println!(
            "  GA sum throughput {:.4} (AoI {:.3}, feasible {}, best found in generation {})",
            r.sum_throughput, r.aoi_at_best, r.feasible, r.generation_of_best
        );
        println!("  fixed split        {:.4} (AoI {:.3e})", b.sum_throughput, b.aoi);

        let (table, axis) = grid_search(64, |v| {
            let a = match problem {
                Problem::P1 => Allocation::Tep { alpha_ap: v[0], beta_r: v[1] },
                Problem::P2 => Allocation::Eep { alpha_et: v[0], beta_r: v[1] },
            };
            Ok(assess(&a, &config, threshold, ga.penalty, &quad)?.fitness)
        })?;
        let (k, best) = table.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
        println!("  64x64 grid best    {best:.4} at ({:.3}, {:.3})", axis[k / 64], axis[k % 64]);
    }
    Ok(())
}
