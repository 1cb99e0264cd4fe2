//! Numeric kernel shared by the rest of the simulator.

mod bessel;
mod fft;
mod rng;
mod stats;
mod theory;

use thiserror::Error;

pub use bessel::{bessel_i0, bessel_i0_scaled, bessel_j0, I0_MAX_ARG, J0_MAX_ARG};
pub use fft::{fft, FftPlan};
pub use rng::{derive_seed, gaussian_pair, RngStream};
pub use stats::{chi_square_critical, chi_square_uniform, ks_critical, ks_statistic, KS_MIN_SAMPLES};
pub use theory::{db_to_linear, q_function, theoretical_ber};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("size error: {0}")]
    Size(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
