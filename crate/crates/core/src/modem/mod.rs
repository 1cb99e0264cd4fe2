//! Symbol-domain processing: Gray-coded square QAM, OFDM with cyclic prefix,
//! and single-tap zero-forcing equalization.

mod ofdm;
mod qam;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use ofdm::{equalize, ofdm_demodulate, ofdm_modulate, OfdmModem, SINGULAR_GAIN};
pub use qam::{demap_qam, map_qam};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModemError {
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid modem parameters: {0}")]
    InvalidParams(String),
    #[error("channel gain magnitude {0:e} is too small to equalize")]
    SingularChannel(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    pub fn order(self) -> u32 {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        self.order().trailing_zeros() as usize
    }

    pub fn from_order(order: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.order() == order)
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" | "4qam" | "qam" => Ok(Modulation::Qpsk),
            "16qam" => Ok(Modulation::Qam16),
            "64qam" => Ok(Modulation::Qam64),
            other => Err(format!("unknown modulation '{other}' (expected qpsk, 16qam or 64qam)")),
        }
    }
}

/// OFDM geometry plus constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModemParams {
    pub modulation: Modulation,
    pub n_fft: usize,
    pub n_used: usize,
    pub cp_len: usize,
}

impl ModemParams {
    pub fn new(
        modulation: Modulation,
        n_fft: usize,
        n_used: usize,
        cp_ratio: f64,
    ) -> Result<Self, ModemError> {
        if n_fft < 4 || !n_fft.is_power_of_two() {
            return Err(ModemError::InvalidParams(format!(
                "FFT size {n_fft} is not a power of two >= 4"
            )));
        }
        if n_used == 0 || !n_used.is_multiple_of(2) || n_used > n_fft - 2 {
            return Err(ModemError::InvalidParams(format!(
                "used subcarriers {n_used} must be even, nonzero and at most {}",
                n_fft - 2
            )));
        }
        let cp = cp_ratio * n_fft as f64;
        if !(0.0..1.0).contains(&cp_ratio) || (cp - cp.round()).abs() > 1e-9 {
            return Err(ModemError::InvalidParams(format!(
                "cyclic prefix ratio {cp_ratio} does not give a whole number of samples for FFT size {n_fft}"
            )));
        }
        Ok(Self {
            modulation,
            n_fft,
            n_used,
            cp_len: cp.round() as usize,
        })
    }

    /// 256-point FFT, 200 used subcarriers, CP of 1/4.
    pub fn table1(modulation: Modulation) -> Self {
        Self {
            modulation,
            n_fft: 256,
            n_used: 200,
            cp_len: 64,
        }
    }

    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.cp_len
    }

    pub fn bits_per_ofdm_symbol(&self) -> usize {
        self.n_used * self.modulation.bits_per_symbol()
    }

    pub fn cp_ratio(&self) -> f64 {
        self.cp_len as f64 / self.n_fft as f64
    }

    /// FFT bin carrying frame entry `i`: positive bins `1..=n_used/2` first,
    /// then the negative half `n_fft - n_used/2 .. n_fft`. DC stays empty.
    pub fn subcarrier_bin(&self, i: usize) -> usize {
        let half = self.n_used / 2;
        if i < half {
            i + 1
        } else {
            self.n_fft - self.n_used + i
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_geometry() {
        let p = ModemParams::new(Modulation::Qpsk, 256, 200, 0.25).unwrap();
        assert_eq!(p, ModemParams::table1(Modulation::Qpsk));
        assert_eq!(p.symbol_len(), 320);
        assert_eq!(p.bits_per_ofdm_symbol(), 400);
        assert_eq!(ModemParams::table1(Modulation::Qam64).bits_per_ofdm_symbol(), 1200);
    }

    #[test]
    fn bin_layout() {
        let p = ModemParams::table1(Modulation::Qpsk);
        let bins: Vec<usize> = (0..200).map(|i| p.subcarrier_bin(i)).collect();
        assert_eq!(bins[0], 1);
        assert_eq!(bins[99], 100);
        assert_eq!(bins[100], 156);
        assert_eq!(bins[199], 255);
        assert!(!bins.contains(&0));
    }

    #[test]
    fn invalid_params() {
        assert!(ModemParams::new(Modulation::Qpsk, 200, 100, 0.25).is_err());
        assert!(ModemParams::new(Modulation::Qpsk, 256, 256, 0.25).is_err());
        assert!(ModemParams::new(Modulation::Qpsk, 256, 201, 0.25).is_err());
        assert!(ModemParams::new(Modulation::Qpsk, 256, 200, 0.3).is_err());
        assert!(ModemParams::new(Modulation::Qpsk, 256, 200, 0.0).is_ok());
    }

    #[test]
    fn modulation_names_round_trip() {
        for m in Modulation::ALL {
            assert_eq!(m.name().parse::<Modulation>().unwrap(), m);
            assert_eq!(Modulation::from_order(m.order()), Some(m));
        }
        assert!("8psk".parse::<Modulation>().is_err());
    }
}
