//! Error-probability analysis for binary DPSK with L-branch diversity over
//! independent, non-identically distributed Rayleigh fading.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! - [`channel`]: branch parameters and configuration validation,
//! - [`doppler`]: one-bit fading correlation from a Doppler spectrum,
//! - [`analytic`]: closed-form bit error probability, Chernoff bounds and an
//!   independent integration cross-check,
//! - [`sim`]: a Monte Carlo link simulator with reproducible parallel streams.
//!
//! All library math is in linear units with `N0 = 1`; dB only appears in
//! [`analytic::power_split`] and [`db_to_linear`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod channel;
mod dd;
pub mod doppler;
mod error;
pub mod optimize;
pub mod quadrature;
pub mod rng;
pub mod sim;
pub mod special;

pub use channel::{validate_config, BranchParams, Detector, DiversityConfig};
pub use error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}
