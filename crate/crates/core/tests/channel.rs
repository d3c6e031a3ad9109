mod common;

use common::{ks_distance, quartic_samples};
use proptest::prelude::*;
use starris::channel::{
    cascade_moment, gamma_fit, gauss_hermite_rule, nakagami_sample, quartic_gain_cdf, quartic_gain_cdf_series,
    quartic_gain_pdf, NakagamiParams,
};
use starris::special::ln_gamma;

fn m2() -> NakagamiParams {
    NakagamiParams { m: 2.0, omega: 1.0 }
}

fn params() -> impl Strategy<Value = NakagamiParams> {
    (0.5f64..8.0, 0.1f64..5.0).prop_map(|(m, omega)| NakagamiParams { m, omega })
}

proptest! {
    #[test]
    fn second_moment_is_power_product(a in params(), b in params()) {
        let mu2 = cascade_moment(2, a, b).unwrap();
        prop_assert!((mu2 - a.omega * b.omega).abs() <= 1e-12 * a.omega * b.omega);
    }

    #[test]
    fn fit_reproduces_both_moments(a in params(), b in params(), n in 1u32..80) {
        let g = gamma_fit(a, b, n).unwrap();
        let mu1 = cascade_moment(1, a, b).unwrap();
        let var = a.omega * b.omega - mu1 * mu1;
        // Per element: mean k/θ, variance k/θ².
        prop_assert!((g.k / g.theta - mu1).abs() <= 1e-13 * mu1);
        prop_assert!((g.k / (g.theta * g.theta) - var).abs() <= 1e-12 * var);
        prop_assert_eq!(g.nk_int, ((n as f64 * g.k).round() as u32).max(1));
    }

    #[test]
    fn cdf_is_a_distribution(a in params(), b in params(), n in 1u32..60) {
        let g = gamma_fit(a, b, n).unwrap();
        let (lo, hi) = g.quartic_bounds(1e-12);
        prop_assert_eq!(quartic_gain_cdf(&g, 0.0), 0.0);
        let grid: Vec<f64> = (0..100).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / 99.0).exp()).collect();
        let mut prev = 0.0;
        for x in grid {
            let f = quartic_gain_cdf(&g, x);
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f >= prev);
            prev = f;
        }
        prop_assert!(prev > 1.0 - 1e-6);
    }
}

#[test]
fn fitted_constants_at_reference_setting() {
    let g = gamma_fit(m2(), m2(), 30).unwrap();
    // μ(1) = Γ(2.5)²/(Γ(2)²·2) for m = 2, Ω = 1.
    let mu1 = (2.0 * ln_gamma(2.5) - 2f64.ln()).exp();
    let k = mu1 * mu1 / (1.0 - mu1 * mu1);
    assert!((g.k - k).abs() < 1e-12);
    assert!((g.k - 3.5599).abs() < 2e-4);
    assert!((g.theta - 4.0290).abs() < 2e-4);
    assert_eq!(g.nk_int, 107);
}

#[test]
fn nakagami_sample_mean_matches_closed_form() {
    let p = NakagamiParams { m: 1.5, omega: 2.0 };
    let xs = nakagami_sample(p, 1_000_000, 9).unwrap();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let power = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    let closed = (ln_gamma(2.0) - ln_gamma(1.5) + 0.5 * (p.omega / p.m).ln()).exp();
    assert!((mean - closed).abs() / closed < 3e-3, "{mean} vs {closed}");
    assert!((power - p.omega).abs() / p.omega < 5e-3);
}

#[test]
fn product_draws_match_fitted_moments() {
    let n = 10_000_000;
    let h = nakagami_sample(m2(), n, 1).unwrap();
    let g = nakagami_sample(m2(), n, 2).unwrap();
    let prod: Vec<f64> = h.iter().zip(&g).map(|(a, b)| a * b).collect();
    let mean = prod.iter().sum::<f64>() / n as f64;
    let var = prod.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let fit = gamma_fit(m2(), m2(), 1).unwrap();
    let (fm, fv) = (fit.k / fit.theta, fit.k / fit.theta.powi(2));
    assert!((mean - fm).abs() / fm < 5e-3, "{mean} vs {fm}");
    assert!((var - fv).abs() / fv < 5e-3, "{var} vs {fv}");
}

#[test]
fn continuous_cdf_tracks_simulated_sums() {
    for n in [1u32, 2, 5, 10, 30] {
        let g = gamma_fit(m2(), m2(), n).unwrap();
        let d = ks_distance(quartic_samples(n, 1_000_000, 100 + n as u64), |x| quartic_gain_cdf(&g, x));
        assert!(d < 0.02, "N = {n}: KS {d}");
    }
}

#[test]
fn integer_shape_series_at_thirty_elements() {
    let g = gamma_fit(m2(), m2(), 30).unwrap();
    let samples = quartic_samples(30, 1_000_000, 77);
    let d = ks_distance(samples.clone(), |x| quartic_gain_cdf_series(&g, x));
    assert!(d < 0.01, "KS {d}");
    let mut s = samples;
    s.sort_by(f64::total_cmp);
    let median = s[s.len() / 2];
    let f = quartic_gain_cdf_series(&g, median);
    assert!((f - 0.5).abs() < 0.02, "F(median) = {f}");
}

#[test]
fn series_and_continuous_agree_for_integer_shape() {
    // Force an integral shape so both forms describe the same law.
    let mut g = gamma_fit(m2(), m2(), 30).unwrap();
    g.k = g.nk_int as f64 / 30.0;
    for x in [1e2, 1e4, 1e5, 1e6, 1e7] {
        let a = quartic_gain_cdf(&g, x);
        let b = quartic_gain_cdf_series(&g, x);
        assert!((a - b).abs() < 1e-12, "{x}: {a} vs {b}");
    }
}

#[test]
fn pdf_integrates_to_one() {
    let g = gamma_fit(m2(), m2(), 30).unwrap();
    let (lo, hi) = g.quartic_bounds(1e-14);
    // Trapezoid in ln x: ∫ f(x) dx = ∫ f(eᵘ) eᵘ du.
    let (a, b) = (lo.ln(), hi.ln());
    let steps = 200_000;
    let h = (b - a) / steps as f64;
    let total: f64 = (0..=steps)
        .map(|i| {
            let u = a + i as f64 * h;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            w * quartic_gain_pdf(&g, u.exp()) * u.exp()
        })
        .sum::<f64>()
        * h;
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

#[test]
fn hermite_rule_is_exact_for_low_degree() {
    let rule = gauss_hermite_rule(5).unwrap();
    for d in 0..10u32 {
        let got = rule.integrate(|u| u.powi(d as i32));
        // ∫ u^d e^{-u²} du = Γ((d+1)/2) for even d, 0 for odd d.
        let want = if d % 2 == 1 { 0.0 } else { ln_gamma((d as f64 + 1.0) / 2.0).exp() };
        assert!((got - want).abs() < 1e-10, "degree {d}: {got} vs {want}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(gamma_fit(m2(), m2(), 0).is_err());
    assert!(NakagamiParams::new(-1.0, 1.0).is_err());
    assert!(NakagamiParams::new(1.0, 0.0).is_err());
    assert!(gauss_hermite_rule(0).is_err());
}
