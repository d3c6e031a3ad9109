//! Cascaded Nakagami-m channel statistics and the quadrature rule used on
//! the outage integrals.

mod cascade;
mod hermite;
mod nakagami;

pub use cascade::{
    cascade_moment, gamma_fit, quartic_gain_cdf, quartic_gain_cdf_series, quartic_gain_pdf, GammaApprox,
};
pub use hermite::{gauss_hermite_rule, QuadratureRule, MAX_ORDER};
pub use nakagami::{nakagami_sample, NakagamiParams, NakagamiSampler};
