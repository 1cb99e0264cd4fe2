//! Channel models: calibrated AWGN and flat block fading (Rayleigh / Rician)
//! with symbol-to-symbol correlation set by the maximum Doppler shift.
//!
//! A fading gain is `h = sqrt(K/(K+1)) + sqrt(1/(K+1)) g` where `g` is a
//! unit-power complex Gaussian AR(1) process with coefficient
//! `rho = J0(2 pi f_d T_sym)`. This keeps `E|h|^2 = 1`; the line-of-sight
//! amplitude is `A = sqrt(K/(K+1))` and each scattered component has variance
//! `sigma^2 = 1/(2(K+1))`, so `K = A^2 / (2 sigma^2)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{bessel_i0_scaled, bessel_j0, db_to_linear, RngStream};

pub const DEFAULT_K_FACTOR: f64 = 3.0;
pub const DEFAULT_RAYLEIGH_DOPPLER_HZ: f64 = 100.0;
pub const DEFAULT_RICIAN_DOPPLER_HZ: f64 = 40.0;
pub const DEFAULT_SYMBOL_DURATION_S: f64 = 32e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("noise calibration error: {0}")]
    Calibration(String),
    #[error("invalid channel parameter: {0}")]
    Parameter(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
    Rician,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Awgn, ChannelKind::Rayleigh, ChannelKind::Rician];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Rayleigh => "rayleigh",
            ChannelKind::Rician => "rician",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh" => Ok(ChannelKind::Rayleigh),
            "rician" | "ricean" => Ok(ChannelKind::Rician),
            other => Err(format!("unknown channel '{other}' (expected awgn, rayleigh or rician)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// Linear `A^2 / (2 sigma^2)`. Ignored for AWGN; forced to zero for Rayleigh.
    pub k_factor: f64,
    pub doppler_hz: f64,
    pub symbol_duration_s: f64,
}

impl ChannelSpec {
    pub fn awgn() -> Self {
        Self {
            kind: ChannelKind::Awgn,
            k_factor: 0.0,
            doppler_hz: 0.0,
            symbol_duration_s: DEFAULT_SYMBOL_DURATION_S,
        }
    }

    pub fn rayleigh() -> Self {
        Self {
            kind: ChannelKind::Rayleigh,
            k_factor: 0.0,
            doppler_hz: DEFAULT_RAYLEIGH_DOPPLER_HZ,
            symbol_duration_s: DEFAULT_SYMBOL_DURATION_S,
        }
    }

    pub fn rician(k_factor: f64) -> Self {
        Self {
            kind: ChannelKind::Rician,
            k_factor,
            doppler_hz: DEFAULT_RICIAN_DOPPLER_HZ,
            symbol_duration_s: DEFAULT_SYMBOL_DURATION_S,
        }
    }

    /// Defaults for `kind`: K = 3 for Rician, Doppler 100 Hz (Rayleigh) / 40 Hz (Rician).
    pub fn for_kind(kind: ChannelKind) -> Self {
        match kind {
            ChannelKind::Awgn => Self::awgn(),
            ChannelKind::Rayleigh => Self::rayleigh(),
            ChannelKind::Rician => Self::rician(DEFAULT_K_FACTOR),
        }
    }

    pub fn with_doppler(self, doppler_hz: f64) -> Self {
        Self { doppler_hz, ..self }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !self.k_factor.is_finite() || self.k_factor < 0.0 {
            return Err(ChannelError::Parameter(format!(
                "k_factor must be finite and >= 0, got {}",
                self.k_factor
            )));
        }
        if !self.doppler_hz.is_finite() || self.doppler_hz < 0.0 {
            return Err(ChannelError::Parameter(format!(
                "doppler_hz must be finite and >= 0, got {}",
                self.doppler_hz
            )));
        }
        if !self.symbol_duration_s.is_finite() || self.symbol_duration_s <= 0.0 {
            return Err(ChannelError::Parameter(format!(
                "symbol_duration_s must be > 0, got {}",
                self.symbol_duration_s
            )));
        }
        Ok(())
    }

    pub fn effective_k(&self) -> f64 {
        match self.kind {
            ChannelKind::Rician => self.k_factor,
            _ => 0.0,
        }
    }

    /// Per-component variance of the scattered part.
    pub fn sigma2(&self) -> f64 {
        0.5 / (self.effective_k() + 1.0)
    }

    /// Line-of-sight amplitude `A`.
    pub fn los_amplitude(&self) -> f64 {
        let k = self.effective_k();
        (k / (k + 1.0)).sqrt()
    }

    /// Symbol-to-symbol correlation `J0(2 pi f_d T_sym)`.
    pub fn correlation(&self) -> Result<f64, ChannelError> {
        let rho = bessel_j0(TAU * self.doppler_hz * self.symbol_duration_s)
            .map_err(|e| ChannelError::Parameter(e.to_string()))?;
        if !(-1.0..=1.0).contains(&rho) {
            return Err(ChannelError::Parameter(format!("correlation {rho} outside [-1, 1]")));
        }
        Ok(rho)
    }
}

/// Complex gain applied to one OFDM symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingGain {
    pub h: Complex64,
}

impl FadingGain {
    pub const UNITY: FadingGain = FadingGain {
        h: Complex64 { re: 1.0, im: 0.0 },
    };

    pub fn envelope(&self) -> f64 {
        self.h.norm()
    }

    /// Phase in `[0, 2 pi)`.
    pub fn phase(&self) -> f64 {
        self.h.arg().rem_euclid(TAU)
    }
}

/// Draws `n_symbols` block-fading gains. AWGN yields unit gains without
/// touching the stream.
pub fn make_gain_sequence(
    spec: &ChannelSpec,
    n_symbols: usize,
    rng: &mut RngStream,
) -> Result<Vec<FadingGain>, ChannelError> {
    if n_symbols == 0 {
        return Err(ChannelError::Size("gain sequence needs at least one symbol".into()));
    }
    spec.validate()?;
    if spec.kind == ChannelKind::Awgn {
        return Ok(vec![FadingGain::UNITY; n_symbols]);
    }
    let rho = spec.correlation()?;
    let innovation = (1.0 - rho * rho).max(0.0).sqrt();
    let k = spec.effective_k();
    let los = Complex64::new((k / (k + 1.0)).sqrt(), 0.0);
    let scatter = (1.0 / (k + 1.0)).sqrt();

    let mut draw = || {
        let (x, y) = rng.gaussian_pair();
        Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    };
    let mut g = draw();
    let mut gains = Vec::with_capacity(n_symbols);
    for i in 0..n_symbols {
        if i > 0 {
            g = g * rho + draw() * innovation;
        }
        gains.push(FadingGain { h: los + g * scatter });
    }
    Ok(gains)
}

/// Multiplies each symbol's samples by its gain.
pub fn apply_fading(
    symbols: &[Vec<Complex64>],
    gains: &[FadingGain],
) -> Result<Vec<Vec<Complex64>>, ChannelError> {
    if symbols.len() != gains.len() {
        return Err(ChannelError::Size(format!(
            "{} symbols but {} gains",
            symbols.len(),
            gains.len()
        )));
    }
    Ok(symbols
        .iter()
        .zip(gains)
        .map(|(s, g)| s.iter().map(|v| v * g.h).collect())
        .collect())
}

pub fn mean_power(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Adds complex white Gaussian noise in place so that
/// `signal_power / noise_power = 10^(snr_db/10)`. `snr_db = +inf` adds nothing.
pub fn add_awgn_in_place(
    samples: &mut [Complex64],
    snr_db: f64,
    signal_power: f64,
    rng: &mut RngStream,
) -> Result<(), ChannelError> {
    if !signal_power.is_finite() || signal_power <= 0.0 {
        return Err(ChannelError::Calibration(format!(
            "signal power must be positive and finite, got {signal_power}"
        )));
    }
    if snr_db.is_nan() {
        return Err(ChannelError::Calibration("SNR is NaN".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(());
    }
    let sigma = (signal_power / (2.0 * db_to_linear(snr_db))).sqrt();
    for s in samples.iter_mut() {
        let (x, y) = rng.gaussian_pair();
        *s += Complex64::new(sigma * x, sigma * y);
    }
    Ok(())
}

pub fn apply_awgn(
    samples: &[Complex64],
    snr_db: f64,
    signal_power: f64,
    rng: &mut RngStream,
) -> Result<Vec<Complex64>, ChannelError> {
    let mut out = samples.to_vec();
    add_awgn_in_place(&mut out, snr_db, signal_power, rng)?;
    Ok(out)
}

/// Envelope density: Rayleigh for K = 0, Rician otherwise.
pub fn envelope_pdf(spec: &ChannelSpec, r: f64) -> Result<f64, ChannelError> {
    if r.is_nan() || r < 0.0 {
        return Err(ChannelError::Domain(format!("envelope must be >= 0, got {r}")));
    }
    if spec.kind == ChannelKind::Awgn {
        return Err(ChannelError::Parameter("AWGN channel has no fading envelope".into()));
    }
    spec.validate()?;
    let s2 = spec.sigma2();
    let a = spec.los_amplitude();
    if a == 0.0 {
        return Ok(r / s2 * (-r * r / (2.0 * s2)).exp());
    }
    // r/s2 * exp(-(r^2 + A^2)/(2 s2)) * I0(A r / s2), with I0 scaled by e^{-Ar/s2}
    let scaled = bessel_i0_scaled(a * r / s2).map_err(|e| ChannelError::Domain(e.to_string()))?;
    Ok(r / s2 * (-(r - a) * (r - a) / (2.0 * s2)).exp() * scaled)
}

/// Envelope CDF from Simpson integration of [`envelope_pdf`] on a fixed grid.
#[derive(Debug, Clone)]
pub struct EnvelopeCdf {
    spec: ChannelSpec,
    step: f64,
    nodes: Vec<f64>,
}

impl EnvelopeCdf {
    pub fn new(spec: &ChannelSpec, intervals: usize) -> Result<Self, ChannelError> {
        if intervals == 0 {
            return Err(ChannelError::Size("need at least one interval".into()));
        }
        envelope_pdf(spec, 0.0)?;
        let upper = spec.los_amplitude() + 14.0 * spec.sigma2().sqrt();
        let step = upper / intervals as f64;
        let mut nodes = Vec::with_capacity(intervals + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        for i in 0..intervals {
            acc += simpson(spec, i as f64 * step, (i + 1) as f64 * step)?;
            nodes.push(acc);
        }
        Ok(Self {
            spec: *spec,
            step,
            nodes,
        })
    }

    pub fn total_mass(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let idx = (r / self.step) as usize;
        if idx + 1 >= self.nodes.len() {
            return 1.0;
        }
        let base = idx as f64 * self.step;
        let partial = simpson(&self.spec, base, r).unwrap_or(0.0);
        (self.nodes[idx] + partial).min(1.0)
    }
}

fn simpson(spec: &ChannelSpec, a: f64, b: f64) -> Result<f64, ChannelError> {
    let m = 0.5 * (a + b);
    Ok((b - a) / 6.0 * (envelope_pdf(spec, a)? + 4.0 * envelope_pdf(spec, m)? + envelope_pdf(spec, b)?))
}

/// Closed-form Rayleigh CDF `1 - exp(-r^2 / (2 sigma^2))`.
pub fn rayleigh_cdf(sigma2: f64, r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        1.0 - (-r * r / (2.0 * sigma2)).exp()
    }
}

/// Moment-based K estimate from `E|h|^2` and `E|h|^4`.
pub fn estimate_k_factor(gains: &[FadingGain]) -> f64 {
    let n = gains.len() as f64;
    let m2 = gains.iter().map(|g| g.h.norm_sqr()).sum::<f64>() / n;
    let m4 = gains.iter().map(|g| g.h.norm_sqr().powi(2)).sum::<f64>() / n;
    let los_power = (2.0 * m2 * m2 - m4).max(0.0).sqrt();
    los_power / (m2 - los_power)
}
