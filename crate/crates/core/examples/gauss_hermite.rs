//! The Gauss-Hermite rule used by the closed forms.
//!
//! cargo run --release --example gauss_hermite

use starris::channel::gauss_hermite_rule;
use starris::special::ln_gamma;

fn main() -> starris::Result<()> {
    let rule = gauss_hermite_rule(30)?;
    println!("order {}: first nodes {:?}", rule.order, &rule.nodes[..3]);

    // ∫ u^d e^{-u²} du is Γ((d+1)/2) for even d.
    for d in [0, 2, 4, 10, 20] {
        let got = rule.integrate(|u| u.powi(d));
        let want = ln_gamma((d as f64 + 1.0) / 2.0).exp();
        println!("degree {d:>2}: {got:.15e}  exact {want:.15e}");
    }

    // A smooth non-polynomial weight: ∫ cos(u) e^{-u²} du = √π e^{-1/4}.
    for w in [5, 10, 20, 30] {
        let r = gauss_hermite_rule(w)?;
        let err = r.integrate(f64::cos) - std::f64::consts::PI.sqrt() * (-0.25f64).exp();
        println!("W = {w:>2}: cos error {err:.2e}");
    }
    Ok(())
}
