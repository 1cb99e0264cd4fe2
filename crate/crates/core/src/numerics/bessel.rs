//! Zeroth-order Bessel functions.
//!
//! `I0` uses its power series below [`I0_SERIES_LIMIT`] and the large-argument
//! asymptotic expansion above it. All series terms are positive, so the series
//! stays accurate to a few ulps well past the point where the asymptotic
//! expansion becomes usable. `J0` follows the same split at [`J0_SERIES_LIMIT`].

use std::f64::consts::{FRAC_PI_4, PI};

use super::NumericsError;

pub const I0_MAX_ARG: f64 = 700.0;
pub const J0_MAX_ARG: f64 = 1e6;

const I0_SERIES_LIMIT: f64 = 30.0;
const J0_SERIES_LIMIT: f64 = 12.0;

/// Modified Bessel function of the first kind, order zero, for `0 <= x <= 700`.
pub fn bessel_i0(x: f64) -> Result<f64, NumericsError> {
    check_i0_arg(x)?;
    if x < I0_SERIES_LIMIT {
        Ok(i0_series(x))
    } else {
        Ok(i0_asymptotic_scaled(x) * x.exp())
    }
}

/// Exponentially scaled `e^{-x} I0(x)`, defined for every finite `x >= 0`.
///
/// Used where `I0` multiplies a decaying exponential (the Rician density) and
/// the unscaled value would overflow.
pub fn bessel_i0_scaled(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() || x < 0.0 {
        return Err(NumericsError::Range(format!(
            "I0 argument must be finite and >= 0, got {x}"
        )));
    }
    if x < I0_SERIES_LIMIT {
        Ok(i0_series(x) * (-x).exp())
    } else {
        Ok(i0_asymptotic_scaled(x))
    }
}

fn check_i0_arg(x: f64) -> Result<(), NumericsError> {
    if !(0.0..=I0_MAX_ARG).contains(&x) {
        return Err(NumericsError::Range(format!(
            "I0 argument must lie in [0, {I0_MAX_ARG}], got {x}"
        )));
    }
    Ok(())
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k)
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Bessel function of the first kind, order zero, for `|x| <= 1e6`.
pub fn bessel_j0(x: f64) -> Result<f64, NumericsError> {
    if x.is_nan() || x.abs() > J0_MAX_ARG {
        return Err(NumericsError::Range(format!(
            "J0 argument must satisfy |x| <= {J0_MAX_ARG}, got {x}"
        )));
    }
    let x = x.abs();
    if x < J0_SERIES_LIMIT {
        Ok(j0_series(x))
    } else {
        Ok(j0_asymptotic(x))
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term.abs() > 1e-18 {
        term *= -q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

// Hankel expansion: J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) + Q sin(x - pi/4)),
// with a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k), P = sum (-1)^m a_{2m} x^{-2m},
// Q = sum (-1)^m a_{2m+1} x^{-2m-1}.
fn j0_asymptotic(x: f64) -> f64 {
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    for k in 0..60 {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        let odd = (2 * k + 1) as f64;
        let next = term * odd * odd / ((k + 1) as f64 * 8.0 * x);
        if next > term || next < 1e-18 {
            break;
        }
        term = next;
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() + q * chi.sin())
}
