//! `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Unset keys keep their defaults; each key may appear once.

use std::str::FromStr;

use crate::channel::{ChannelKind, ChannelSpec, DEFAULT_K_FACTOR, DEFAULT_SYMBOL_DURATION_S};
use crate::link::{snr_range, SimConfig, StopRule, DEFAULT_INFO_BITS, DEFAULT_MAX_BITS, DEFAULT_MIN_ERRORS, SNR_RANGE_DB};
use crate::modem::{ModemParams, Modulation};
use crate::numerics::derive_seed;

use super::CliError;

pub const KEYS: [&str; 16] = [
    "bits",
    "fft_size",
    "used_subcarriers",
    "cp_ratio",
    "modulation",
    "coding",
    "channel",
    "k_factor",
    "doppler_hz",
    "symbol_duration_s",
    "snr_min",
    "snr_step",
    "snr_max",
    "seed",
    "min_errors",
    "max_bits",
];

pub const DEFAULT_SEED: u64 = 1;

/// Fully resolved settings. One sweep runs per (channel, modulation) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub bits: usize,
    pub fft_size: usize,
    pub used_subcarriers: usize,
    pub cp_ratio: f64,
    pub modulations: Vec<Modulation>,
    pub coding: bool,
    pub channels: Vec<ChannelKind>,
    pub k_factor: f64,
    /// `None` keeps the per-channel default (100 Hz Rayleigh, 40 Hz Rician).
    pub doppler_hz: Option<f64>,
    pub symbol_duration_s: f64,
    pub snr_min: f64,
    pub snr_step: f64,
    pub snr_max: f64,
    pub seed: u64,
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bits: DEFAULT_INFO_BITS,
            fft_size: 256,
            used_subcarriers: 200,
            cp_ratio: 0.25,
            modulations: Modulation::ALL.to_vec(),
            coding: true,
            channels: ChannelKind::ALL.to_vec(),
            k_factor: DEFAULT_K_FACTOR,
            doppler_hz: None,
            symbol_duration_s: DEFAULT_SYMBOL_DURATION_S,
            snr_min: 0.0,
            snr_step: 1.0,
            snr_max: 30.0,
            seed: DEFAULT_SEED,
            min_errors: DEFAULT_MIN_ERRORS,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub channel: Option<String>,
    pub modulation: Option<String>,
    pub coding: Option<String>,
    pub snr: Option<String>,
    pub seed: Option<String>,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::InvalidConfig(format!("{key}: {msg}"))
}

fn parse_num<T: FromStr>(key: &str, value: &str, range: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse {value:?}; expected {range}")))
}

fn parse_real(key: &str, value: &str, range: &str) -> Result<f64, CliError> {
    let x: f64 = parse_num(key, value, range)?;
    if !x.is_finite() {
        return Err(invalid(key, format!("{value} is not finite; expected {range}")));
    }
    Ok(x)
}

fn parse_list<T: FromStr + Copy>(key: &str, value: &str, all: &[T], names: &str) -> Result<Vec<T>, CliError> {
    if value.eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        let parsed = item
            .parse()
            .map_err(|_| invalid(key, format!("unknown value {item:?}; expected one of {names}, or all")))?;
        out.push(parsed);
    }
    Ok(out)
}

fn parse_coding(value: &str) -> Result<bool, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(invalid("coding", format!("unknown value {value:?}; expected on or off"))),
    }
}

/// Accepts a decimal (`0.25`) or a fraction (`1/4`).
fn parse_ratio(value: &str) -> Result<f64, CliError> {
    const RANGE: &str = "a ratio in [0, 1) such as 1/4 or 0.25";
    let ratio = match value.split_once('/') {
        Some((num, den)) => {
            let num = parse_real("cp_ratio", num.trim(), RANGE)?;
            let den = parse_real("cp_ratio", den.trim(), RANGE)?;
            if den == 0.0 {
                return Err(invalid("cp_ratio", "zero denominator"));
            }
            num / den
        }
        None => parse_real("cp_ratio", value, RANGE)?,
    };
    if !(0.0..1.0).contains(&ratio) {
        return Err(invalid("cp_ratio", format!("{value} out of range; expected {RANGE}")));
    }
    Ok(ratio)
}

/// Parses `min:step:max`.
fn parse_snr_triplet(value: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let [min, step, max] = parts[..] else {
        return Err(invalid("snr", format!("{value:?} is not min:step:max")));
    };
    Ok((
        parse_real("snr_min", min, "a number of dB")?,
        parse_real("snr_step", step, "a number of dB")?,
        parse_real("snr_max", max, "a number of dB")?,
    ))
}

impl Settings {
    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "bits" => self.bits = parse_num(key, value, "an integer >= 1")?,
            "fft_size" => self.fft_size = parse_num(key, value, "a power of two >= 4")?,
            "used_subcarriers" => self.used_subcarriers = parse_num(key, value, "an even integer")?,
            "cp_ratio" => self.cp_ratio = parse_ratio(value)?,
            "modulation" => self.modulations = parse_list(key, value, &Modulation::ALL, "qpsk, 16qam, 64qam")?,
            "coding" => self.coding = parse_coding(value)?,
            "channel" => self.channels = parse_list(key, value, &ChannelKind::ALL, "awgn, rayleigh, rician")?,
            "k_factor" => self.k_factor = parse_real(key, value, "a number ≥ 0")?,
            "doppler_hz" => self.doppler_hz = Some(parse_real(key, value, "a number ≥ 0")?),
            "symbol_duration_s" => self.symbol_duration_s = parse_real(key, value, "a number > 0")?,
            "snr_min" => self.snr_min = parse_real(key, value, "a number of dB")?,
            "snr_step" => self.snr_step = parse_real(key, value, "a number of dB > 0")?,
            "snr_max" => self.snr_max = parse_real(key, value, "a number of dB")?,
            "seed" => self.seed = parse_num(key, value, "an unsigned 64-bit integer")?,
            "min_errors" => self.min_errors = parse_num(key, value, "an integer >= 1")?,
            "max_bits" => self.max_bits = parse_num(key, value, "an integer >= bits")?,
            _ => {
                return Err(CliError::InvalidConfig(format!(
                    "unknown key {key:?}; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies the lines of a config file on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::InvalidConfig(format!(
                    "line {}: expected `key = value`, got {line:?}",
                    idx + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(CliError::InvalidConfig(format!("line {}: {key} is set twice", idx + 1)));
            }
            seen.push(key);
            self.set(key, value).map_err(|e| match e {
                CliError::InvalidConfig(msg) => CliError::InvalidConfig(format!("line {}: {msg}", idx + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = &o.channel {
            self.set("channel", v)?;
        }
        if let Some(v) = &o.modulation {
            self.set("modulation", v)?;
        }
        if let Some(v) = &o.coding {
            self.set("coding", v)?;
        }
        if let Some(v) = &o.snr {
            (self.snr_min, self.snr_step, self.snr_max) = parse_snr_triplet(v)?;
        }
        if let Some(v) = &o.seed {
            self.set("seed", v)?;
        }
        Ok(())
    }

    /// Range checks that the per-key parsers cannot do alone.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.bits == 0 {
            return Err(invalid("bits", "must be >= 1"));
        }
        if self.fft_size < 4 || !self.fft_size.is_power_of_two() {
            return Err(invalid("fft_size", format!("{} is not a power of two >= 4", self.fft_size)));
        }
        if self.used_subcarriers == 0 || !self.used_subcarriers.is_multiple_of(2) || self.used_subcarriers > self.fft_size - 2 {
            return Err(invalid(
                "used_subcarriers",
                format!(
                    "{} out of range; expected an even integer in [2, {}]",
                    self.used_subcarriers,
                    self.fft_size - 2
                ),
            ));
        }
        let cp = self.cp_ratio * self.fft_size as f64;
        if (cp - cp.round()).abs() > 1e-9 {
            return Err(invalid(
                "cp_ratio",
                format!("{} of {} samples is not a whole number of samples", self.cp_ratio, self.fft_size),
            ));
        }
        if self.modulations.is_empty() {
            return Err(invalid("modulation", "no modulation selected"));
        }
        if self.channels.is_empty() {
            return Err(invalid("channel", "no channel selected"));
        }
        if self.k_factor < 0.0 {
            return Err(invalid("k_factor", format!("{} out of range; must be ≥ 0", self.k_factor)));
        }
        if let Some(fd) = self.doppler_hz {
            if fd < 0.0 {
                return Err(invalid("doppler_hz", format!("{fd} out of range; must be ≥ 0")));
            }
        }
        if self.symbol_duration_s <= 0.0 {
            return Err(invalid(
                "symbol_duration_s",
                format!("{} out of range; must be > 0", self.symbol_duration_s),
            ));
        }
        let (lo, hi) = SNR_RANGE_DB;
        for (key, v) in [("snr_min", self.snr_min), ("snr_max", self.snr_max)] {
            if !(lo..=hi).contains(&v) {
                return Err(invalid(key, format!("{v} dB out of range; expected [{lo}, {hi}]")));
            }
        }
        if self.snr_step <= 0.0 {
            return Err(invalid("snr_step", format!("{} out of range; must be > 0", self.snr_step)));
        }
        if self.snr_max < self.snr_min {
            return Err(invalid(
                "snr_max",
                format!("{} is below snr_min {}", self.snr_max, self.snr_min),
            ));
        }
        if self.min_errors == 0 {
            return Err(invalid("min_errors", "must be >= 1"));
        }
        if self.max_bits < self.bits as u64 {
            return Err(invalid(
                "max_bits",
                format!("{} out of range; must be >= bits ({})", self.max_bits, self.bits),
            ));
        }
        Ok(())
    }

    pub fn snr_grid(&self) -> Vec<f64> {
        snr_range(self.snr_min, self.snr_step, self.snr_max)
    }

    /// Sweep configuration for one channel and modulation. The RNG seed is
    /// derived from the master seed and the pair's fixed position in
    /// [`ChannelKind::ALL`] x [`Modulation::ALL`], so a pair gives the same
    /// numbers whether or not other pairs run alongside it.
    pub fn sim_config(&self, channel: ChannelKind, modulation: Modulation) -> Result<SimConfig, CliError> {
        let modem = ModemParams::new(modulation, self.fft_size, self.used_subcarriers, self.cp_ratio)
            .map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        let mut spec = match channel {
            ChannelKind::Rician => ChannelSpec::rician(self.k_factor),
            other => ChannelSpec::for_kind(other),
        };
        if let (Some(fd), true) = (self.doppler_hz, channel != ChannelKind::Awgn) {
            spec = spec.with_doppler(fd);
        }
        spec.symbol_duration_s = self.symbol_duration_s;
        let slot = ChannelKind::ALL.iter().position(|&c| c == channel).unwrap_or(0) * Modulation::ALL.len()
            + Modulation::ALL.iter().position(|&m| m == modulation).unwrap_or(0);
        let config = SimConfig {
            total_info_bits: self.bits,
            modem,
            channel: spec,
            coding_enabled: self.coding,
            snr_grid: self.snr_grid(),
            rng_seed: derive_seed(self.seed, slot as u64),
            stop_rule: StopRule {
                min_errors: self.min_errors,
                max_bits: self.max_bits,
            },
            ..SimConfig::table1(modulation, channel)
        };
        config.validate().map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        Ok(config)
    }

    /// Renders the settings in the same `key = value` grammar.
    pub fn to_config_text(&self) -> String {
        let join = |names: Vec<&str>| names.join(",");
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("bits", self.bits.to_string());
        line("fft_size", self.fft_size.to_string());
        line("used_subcarriers", self.used_subcarriers.to_string());
        line("cp_ratio", self.cp_ratio.to_string());
        line("modulation", join(self.modulations.iter().map(|m| m.name()).collect()));
        line("coding", if self.coding { "on" } else { "off" }.to_string());
        line("channel", join(self.channels.iter().map(|c| c.name()).collect()));
        line("k_factor", self.k_factor.to_string());
        match self.doppler_hz {
            Some(fd) => line("doppler_hz", fd.to_string()),
            None => out.push_str("# doppler_hz unset: per-channel defaults\n"),
        }
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("symbol_duration_s", self.symbol_duration_s.to_string());
        line("snr_min", self.snr_min.to_string());
        line("snr_step", self.snr_step.to_string());
        line("snr_max", self.snr_max.to_string());
        line("seed", self.seed.to_string());
        line("min_errors", self.min_errors.to_string());
        line("max_bits", self.max_bits.to_string());
        out
    }
}
