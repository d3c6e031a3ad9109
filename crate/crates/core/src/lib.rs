//! Outage, throughput and age-of-information analysis for a two-user uplink
//! in which a simultaneously transmitting and reflecting RIS splits each
//! element's amplitude between a reflected user and a transmitted user. Both
//! users harvest energy from the access point before sending.
//!
//! - [`channel`]: Nakagami cascade moments, the Gamma fit of `|Σ hᵢgᵢ|²`,
//!   the CDF of its square and Gauss-Hermite rules.
//! - [`system`]: policies (TEP, EEP, TDMA), harvested energy, SNRs and decoding.
//! - [`analytics`]: closed-form outage, success probability, throughput and AoI.
//! - [`montecarlo`]: seeded, thread-count independent simulation oracles.
//! - [`optimizer`]: the genetic time and power allocator.
//! - [`cli`]: TOML experiments, bundled presets and CSV output.
//!
//! ```
//! use starris::{analytics::evaluate, channel::gauss_hermite_rule, system::*};
//! let quad = gauss_hermite_rule(30).unwrap();
//! let config = SystemConfig::default().with_snr_db(40.0);
//! let r = evaluate(&config, &Policy::Tep(TepPolicy::default()), &quad).unwrap();
//! assert!(r.p_out_t < 1e-6 && r.avg_aoi < 1.01);
//! ```

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod quadrature;
pub mod special;
pub mod system;

pub use error::{Error, Result};
