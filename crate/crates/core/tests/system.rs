use proptest::prelude::*;
use starris::channel::NakagamiParams;
use starris::system::{
    decode_order, harvested_energy, pathloss, sic_outcome, tdma_outcome, uplink_snrs, EepPolicy, LinkFading, Order,
    Policy, SystemConfig, TdmaPolicy, TepPolicy, User,
};

fn config() -> impl Strategy<Value = SystemConfig> {
    (1.0f64..50.0, 1.0f64..10.0, 1.0f64..10.0, 2.0f64..4.0, 2.0f64..4.0, 0.5f64..4.0, 0.5f64..4.0).prop_map(
        |(d0, d_t, d_r, e_t, e_r, m_t, m_r)| SystemConfig {
            d0,
            d_t,
            d_r,
            pl_exp_t: e_t,
            pl_exp_r: e_r,
            fading: LinkFading {
                ap_ris: NakagamiParams { m: 2.0, omega: 1.0 },
                ris_t: NakagamiParams { m: m_t, omega: 1.0 },
                ris_r: NakagamiParams { m: m_r, omega: 1.5 },
            },
            ..SystemConfig::default()
        },
    )
}

fn policy() -> impl Strategy<Value = Policy> {
    let tep = (0.05f64..0.45, 0.05f64..0.45, 0.05f64..0.95).prop_map(|(a_t, a_r, b_r)| {
        Policy::Tep(TepPolicy { alpha_t: a_t, alpha_r: a_r, alpha_ap: 1.0 - a_t - a_r, beta_t: 1.0 - b_r, beta_r: b_r })
    });
    let eep = (0.05f64..0.95, 0.05f64..0.95).prop_map(|(a, b)| Policy::Eep(EepPolicy::from_split(a, b)));
    let tdma = (0.05f64..0.3, 0.05f64..0.3, 0.05f64..0.3).prop_map(|(a_t, a_r, u_t)| {
        Policy::Tdma(TdmaPolicy { alpha_t: a_t, alpha_r: a_r, alpha_ap_t: u_t, alpha_ap_r: 1.0 - a_t - a_r - u_t })
    });
    prop_oneof![tep, eep, tdma]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn swapping_users_swaps_everything(c in config(), p in policy(), gt in 0.1f64..60.0, gr in 0.1f64..60.0, rate in 0.1f64..4.0) {
        let c = c.with_rate(rate);
        let (st, sr) = uplink_snrs(&p, &c, gt, gr);
        let (wt, wr) = uplink_snrs(&p.swapped(), &c.swapped(), gr, gt);
        prop_assert!(close(st, wr) && close(sr, wt));
        let (et, er) = harvested_energy(&p, &c, gt, gr);
        let (xt, xr) = harvested_energy(&p.swapped(), &c.swapped(), gr, gt);
        prop_assert!(close(et, xr) && close(er, xt));
        prop_assert!(close(pathloss(&c, User::T), pathloss(&c.swapped(), User::R)));

        let th = c.gamma_th();
        let (t, r) = sic_outcome(st, sr, th);
        prop_assert_eq!(sic_outcome(sr, st, th), (r, t));
        let a = decode_order(st, sr, th);
        let b = decode_order(sr, st, th);
        prop_assert_eq!(a.ambiguous, b.ambiguous);
        if !a.ambiguous {
            prop_assert_ne!(a.order, b.order);
        }
    }

    #[test]
    fn tdma_user_t_ignores_user_r(c in config(), d_r in 1.0f64..20.0, e_r in 2.0f64..4.0, m_r in 0.5f64..5.0, shift in -0.04f64..0.04, g in 0.1f64..60.0) {
        let p = TdmaPolicy::default();
        let q = TdmaPolicy { alpha_r: p.alpha_r + shift, alpha_ap_r: p.alpha_ap_r - shift, ..p };
        let other = SystemConfig {
            d_r,
            pl_exp_r: e_r,
            fading: LinkFading { ris_r: NakagamiParams { m: m_r, omega: 0.7 }, ..c.fading },
            ..c
        };
        let a = uplink_snrs(&Policy::Tdma(p), &c, g, 1.0).0;
        let b = uplink_snrs(&Policy::Tdma(q), &other, g, 37.0).0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn eep_snr_is_quadratic_in_split(b in 0.05f64..0.45, g in 0.1f64..60.0) {
        let c = SystemConfig::default();
        let one = uplink_snrs(&Policy::Eep(EepPolicy::from_split(0.5, 1.0 - b)), &c, g, g).0;
        let two = uplink_snrs(&Policy::Eep(EepPolicy::from_split(0.5, 1.0 - 2.0 * b)), &c, g, g).0;
        prop_assert!(close(two, 4.0 * one));
    }
}

/// The receiver run step by step: pick an order, decode the first user
/// against the other's interference, then the second one alone.
fn sequential_sic(gt: f64, gr: f64, th: f64) -> (bool, bool) {
    let t_first = gt / (gr + 1.0) >= th;
    let r_first = gr / (gt + 1.0) >= th;
    match (t_first, r_first) {
        (true, true) => (true, true),
        (true, false) => (true, gr >= th),
        (false, true) => (gt >= th, true),
        (false, false) => (false, false),
    }
}

#[test]
fn outage_events_match_enumeration() {
    let axis: Vec<f64> = (0..100).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 99.0)).collect();
    for th in [0.3, 1.0, 3.0] {
        for &gt in &axis {
            for &gr in &axis {
                let (t, r) = sic_outcome(gt, gr, th);
                let neither = gt / (gr + 1.0) < th && gr / (gt + 1.0) < th;
                let t_event = neither || (gt < th && gr / (gt + 1.0) >= th);
                let r_event = neither || (gr < th && gt / (gr + 1.0) >= th);
                assert_eq!(!t, t_event, "t at ({gt}, {gr}, {th})");
                assert_eq!(!r, r_event, "r at ({gt}, {gr}, {th})");
                let both = (gt / (gr + 1.0) >= th && gr >= th) || (gr / (gt + 1.0) >= th && gt >= th);
                assert_eq!(t && r, both);
                assert_eq!((t, r), sequential_sic(gt, gr, th));
                assert_eq!(tdma_outcome(gt, gr, th), (gt >= th, gr >= th));
            }
        }
    }
}

/// SIC forced into a fixed order: the first user is decoded against the
/// second's interference, and only on success is the second tried alone.
fn ordered_sic(gt: f64, gr: f64, th: f64, order: Order) -> (bool, bool) {
    match order {
        Order::TFirst => {
            let t = gt / (gr + 1.0) >= th;
            (t, t && gr >= th)
        }
        Order::RFirst => {
            let r = gr / (gt + 1.0) >= th;
            (r && gt >= th, r)
        }
    }
}

#[test]
fn ambiguous_order_does_not_change_outcomes() {
    let axis: Vec<f64> = (0..60).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 59.0)).collect();
    let mut seen = 0;
    for &gt in &axis {
        for &gr in &axis {
            let d = decode_order(gt, gr, 1.0);
            let chosen = ordered_sic(gt, gr, 1.0, d.order);
            if d.ambiguous {
                seen += 1;
                assert_eq!(chosen, ordered_sic(gt, gr, 1.0, Order::RFirst));
            }
            assert_eq!(chosen, sic_outcome(gt, gr, 1.0));
        }
    }
    assert!(seen > 0);
}

#[test]
fn stronger_near_user_can_lose_decodability() {
    // With U_r decodable first at γ_t = 1.5, U_t succeeds alone; raising γ_t
    // breaks U_r's first stage without yet clearing U_t's own.
    assert_eq!(sic_outcome(1.5, 10.0, 1.0).0, true);
    assert_eq!(sic_outcome(9.5, 10.0, 1.0).0, false);
    assert_eq!(sic_outcome(12.0, 10.0, 1.0).0, true);
}

#[test]
fn decodability_is_monotone_below_the_coupling_level() {
    let gammas: Vec<f64> = (0..400).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 399.0)).collect();
    for th in [0.2, 1.0, 3.0, 15.0] {
        for &gr in &gammas {
            let mut prev = false;
            let mut prev_first = false;
            for &gt in &gammas {
                let t = sic_outcome(gt, gr, th).0;
                let first = t && decode_order(gt, gr, th).order == Order::TFirst && gt / (gr + 1.0) >= th;
                if gr < th * (1.0 + th) {
                    assert!(t || !prev, "γ_r = {gr}, γ_t = {gt}, th = {th}");
                }
                // Decoding U_t first is never lost by raising γ_t.
                assert!(first || !prev_first);
                prev = t;
                prev_first = first;
            }
        }
    }
}

#[test]
fn reference_pathloss() {
    let c = SystemConfig::default();
    assert!((pathloss(&c, User::T) - 2.7778e-4).abs() < 1e-8);
    assert!((pathloss(&c, User::R) - 6.9444e-5).abs() < 1e-9);
}
