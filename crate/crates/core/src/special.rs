//! Log-space special functions.
//!
//! The closed forms sum `nk_int` ≈ 100+ factorial-weighted terms, which
//! overflows in linear space. Everything here returns logarithms and is
//! exponentiated once by the caller.

use std::sync::OnceLock;

const FACT_TABLE: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for m in 1..FACT_TABLE {
            acc += (m as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln m!`.
pub fn ln_factorial(m: u32) -> f64 {
    let m = m as usize;
    if m < FACT_TABLE {
        ln_fact_table()[m]
    } else {
        ln_gamma(m as f64 + 1.0)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Regularized lower incomplete gamma `P(a, x)` for real shape `a`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    statrs::function::gamma::gamma_lr(a, x)
}

/// `ln(1 - e^a)` for `a ≤ 0`.
pub fn ln_1m_exp(a: f64) -> f64 {
    if a >= 0.0 {
        f64::NEG_INFINITY
    } else if a > -std::f64::consts::LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-∞` for an empty or all-`-∞` input.
pub fn ln_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + xs.iter().map(|&x| (x - hi).exp()).sum::<f64>().ln()
}

/// Both tails of the integer-shape regularized incomplete gamma, as logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tails {
    /// `ln P(n, y)`, the lower tail.
    pub ln_p: f64,
    /// `ln Q(n, y)`, the upper tail.
    pub ln_q: f64,
}

impl Tails {
    pub fn p(&self) -> f64 {
        self.ln_p.exp()
    }
    pub fn q(&self) -> f64 {
        self.ln_q.exp()
    }
}

/// Tails of the Gamma(n, 1) distribution at `y` for integer `n ≥ 1`.
///
/// `Q(n, y) = e^{-y} Σ_{m<n} y^m/m!` is the finite series; its complement
/// `P(n, y) = e^{-y} Σ_{m≥n} y^m/m!` converges geometrically for `y < n`.
/// The smaller tail is always summed directly so both keep full relative
/// precision deep into either tail.
pub fn int_gamma_tails(n: u32, y: f64) -> Tails {
    assert!(n >= 1, "integer gamma shape must be at least 1");
    if y.is_nan() {
        return Tails { ln_p: f64::NAN, ln_q: f64::NAN };
    }
    if y <= 0.0 {
        return Tails { ln_p: f64::NEG_INFINITY, ln_q: 0.0 };
    }
    if y == f64::INFINITY {
        return Tails { ln_p: 0.0, ln_q: f64::NEG_INFINITY };
    }
    let ln_y = y.ln();
    if y < n as f64 {
        let lead = n as f64 * ln_y - y - ln_factorial(n);
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut m = n as f64;
        loop {
            m += 1.0;
            term *= y / m;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        let ln_p = lead + sum.ln();
        Tails { ln_p, ln_q: ln_1m_exp(ln_p) }
    } else {
        let lead = (n - 1) as f64 * ln_y - y - ln_factorial(n - 1);
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut m = n - 1;
        while m > 0 {
            term *= m as f64 / y;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            m -= 1;
        }
        let ln_q = lead + sum.ln();
        Tails { ln_p: ln_1m_exp(ln_q), ln_q }
    }
}

/// `ln(P(n, b) - P(n, a))` for `a ≤ b`, taking the difference on whichever
/// side of the distribution avoids cancellation.
pub fn ln_window(a: Tails, b: Tails) -> f64 {
    if b.ln_p < -std::f64::consts::LN_2 {
        if a.ln_p >= b.ln_p {
            return f64::NEG_INFINITY;
        }
        b.ln_p + ln_1m_exp(a.ln_p - b.ln_p)
    } else {
        if b.ln_q >= a.ln_q {
            return f64::NEG_INFINITY;
        }
        a.ln_q + ln_1m_exp(b.ln_q - a.ln_q)
    }
}
