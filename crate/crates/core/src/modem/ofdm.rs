//! OFDM modulation with cyclic prefix.
//!
//! The inverse transform is rescaled by `sqrt(N)` so the modulator is unitary:
//! time-domain power over the useful part equals the frame's mean power times
//! `n_used / n_fft`, and white noise keeps its variance through demodulation.

use num_complex::Complex64;

use super::{ModemError, ModemParams};
use crate::numerics::FftPlan;

/// Gains at or below this magnitude are treated as a singular channel.
pub const SINGULAR_GAIN: f64 = 1e-9;

/// Modulator/demodulator with a cached FFT plan.
#[derive(Debug, Clone)]
pub struct OfdmModem {
    params: ModemParams,
    plan: FftPlan,
    bins: Vec<usize>,
    scale: f64,
}

impl OfdmModem {
    pub fn new(params: ModemParams) -> Result<Self, ModemError> {
        let plan = FftPlan::new(params.n_fft).map_err(|e| ModemError::InvalidParams(e.to_string()))?;
        let bins = (0..params.n_used).map(|i| params.subcarrier_bin(i)).collect();
        Ok(Self {
            params,
            plan,
            bins,
            scale: (params.n_fft as f64).sqrt(),
        })
    }

    pub fn params(&self) -> &ModemParams {
        &self.params
    }

    /// Places `frame` on the used bins, transforms, and prepends the CP.
    pub fn modulate(&self, frame: &[Complex64]) -> Result<Vec<Complex64>, ModemError> {
        let p = &self.params;
        if frame.len() != p.n_used {
            return Err(ModemError::Size(format!(
                "frame has {} symbols, expected {}",
                frame.len(),
                p.n_used
            )));
        }
        let mut grid = vec![Complex64::default(); p.n_fft];
        for (&bin, &s) in self.bins.iter().zip(frame) {
            grid[bin] = s;
        }
        self.plan.inverse(&mut grid);
        let mut out = Vec::with_capacity(p.symbol_len());
        out.extend_from_slice(&grid[p.n_fft - p.cp_len..]);
        out.extend_from_slice(&grid);
        for v in &mut out {
            *v *= self.scale;
        }
        Ok(out)
    }

    /// Strips the CP, transforms, and extracts the used bins.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>, ModemError> {
        let p = &self.params;
        if samples.len() != p.symbol_len() {
            return Err(ModemError::Size(format!(
                "received {} samples, expected {}",
                samples.len(),
                p.symbol_len()
            )));
        }
        let mut grid = samples[p.cp_len..].to_vec();
        self.plan.forward(&mut grid);
        let inv = 1.0 / self.scale;
        Ok(self.bins.iter().map(|&b| grid[b] * inv).collect())
    }
}

pub fn ofdm_modulate(frame: &[Complex64], params: &ModemParams) -> Result<Vec<Complex64>, ModemError> {
    OfdmModem::new(*params)?.modulate(frame)
}

pub fn ofdm_demodulate(samples: &[Complex64], params: &ModemParams) -> Result<Vec<Complex64>, ModemError> {
    OfdmModem::new(*params)?.demodulate(samples)
}

/// Zero-forcing with a known flat gain.
pub fn equalize(frame: &[Complex64], gain: Complex64) -> Result<Vec<Complex64>, ModemError> {
    let mag = gain.norm();
    if mag.is_nan() || mag <= SINGULAR_GAIN {
        return Err(ModemError::SingularChannel(mag));
    }
    let inv = gain.inv();
    Ok(frame.iter().map(|s| s * inv).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitpipe::BitBlock;
    use crate::modem::{demap_qam, map_qam, Modulation};
    use crate::numerics::RngStream;
    use std::f64::consts::PI;

    fn random_frame(seed: u64, m: Modulation) -> Vec<Complex64> {
        let mut bits = vec![0; 200 * m.bits_per_symbol()];
        RngStream::new(seed).fill_bits(&mut bits);
        map_qam(&BitBlock::info(bits).unwrap(), m).unwrap()
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn output_length_and_prefix() {
        let params = ModemParams::table1(Modulation::Qpsk);
        let out = ofdm_modulate(&random_frame(1, Modulation::Qpsk), &params).unwrap();
        assert_eq!(out.len(), 320);
        assert_eq!(&out[..64], &out[256..]);
    }

    #[test]
    fn zero_in_zero_out() {
        let params = ModemParams::table1(Modulation::Qpsk);
        let out = ofdm_modulate(&vec![Complex64::default(); 200], &params).unwrap();
        assert!(out.iter().all(|v| v.norm() == 0.0));
        let back = ofdm_demodulate(&vec![Complex64::default(); 320], &params).unwrap();
        assert!(back.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn round_trip() {
        for m in Modulation::ALL {
            let params = ModemParams::table1(m);
            let frame = random_frame(2, m);
            let back = ofdm_demodulate(&ofdm_modulate(&frame, &params).unwrap(), &params).unwrap();
            assert!(max_err(&frame, &back) < 1e-12);
        }
    }

    #[test]
    fn bits_survive_the_modem() {
        for m in Modulation::ALL {
            let modem = OfdmModem::new(ModemParams::table1(m)).unwrap();
            let mut bits = vec![0; 200 * m.bits_per_symbol()];
            RngStream::new(3).fill_bits(&mut bits);
            let frame = map_qam(&BitBlock::info(bits.clone()).unwrap(), m).unwrap();
            let rx = modem.demodulate(&modem.modulate(&frame).unwrap()).unwrap();
            assert_eq!(demap_qam(&rx, m).bits(), bits.as_slice());
        }
    }

    #[test]
    fn energy_scales_with_occupancy() {
        let params = ModemParams::table1(Modulation::Qam16);
        let frame = random_frame(4, Modulation::Qam16);
        let frame_power = frame.iter().map(|s| s.norm_sqr()).sum::<f64>() / 200.0;
        let out = ofdm_modulate(&frame, &params).unwrap();
        let time_power = out[64..].iter().map(|s| s.norm_sqr()).sum::<f64>() / 256.0;
        let want = frame_power * 200.0 / 256.0;
        assert!(((time_power - want) / want).abs() < 1e-9);
    }

    #[test]
    fn cyclic_shift_gives_phase_ramp() {
        // Taking the FFT window cp_len samples early (i.e. reading the symbol
        // rotated by cp_len) multiplies bin b by exp(-2 pi i b cp / N).
        let params = ModemParams::table1(Modulation::Qpsk);
        let frame = random_frame(5, Modulation::Qpsk);
        let tx = ofdm_modulate(&frame, &params).unwrap();
        let mut early = tx[..256].to_vec();
        early.splice(0..0, tx[..64].iter().copied());
        let rx = ofdm_demodulate(&early, &params).unwrap();
        for (i, (r, x)) in rx.iter().zip(&frame).enumerate() {
            let bin = params.subcarrier_bin(i) as f64;
            let ramp = Complex64::from_polar(1.0, -2.0 * PI * bin * 64.0 / 256.0);
            assert!((r - x * ramp).norm() < 1e-12, "bin {bin}");
            assert!((r.norm() - x.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn equalizer() {
        let frame = random_frame(6, Modulation::Qpsk);
        assert_eq!(equalize(&frame, Complex64::new(1.0, 0.0)).unwrap(), frame);
        let h = Complex64::from_polar(0.3, 1.1);
        let faded: Vec<_> = frame.iter().map(|s| s * h).collect();
        assert!(max_err(&equalize(&faded, h).unwrap(), &frame) < 1e-12);
        assert!(matches!(
            equalize(&frame, Complex64::new(1e-12, 0.0)),
            Err(ModemError::SingularChannel(_))
        ));
    }

    #[test]
    fn size_errors() {
        let params = ModemParams::table1(Modulation::Qpsk);
        assert!(matches!(ofdm_modulate(&[Complex64::default(); 199], &params), Err(ModemError::Size(_))));
        assert!(matches!(ofdm_demodulate(&[Complex64::default(); 256], &params), Err(ModemError::Size(_))));
    }
}
