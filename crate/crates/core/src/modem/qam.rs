//! Gray-coded square QAM.
//!
//! Each symbol takes `k = log2(M)` bits: the first `k/2` choose the in-phase
//! level, the rest the quadrature level. Along each axis the Gray sequence
//! 0, 1, 3, 2, ... runs from the most positive level to the most negative,
//! so bits `00` map to the `(+, +)` corner for 4-QAM.

use num_complex::Complex64;

use super::{ModemError, Modulation};
use crate::bitpipe::{BitBlock, BitRole};

fn axis_scale(modulation: Modulation) -> f64 {
    match modulation {
        Modulation::Qpsk => 1.0 / 2f64.sqrt(),
        Modulation::Qam16 => 1.0 / 10f64.sqrt(),
        Modulation::Qam64 => 1.0 / 42f64.sqrt(),
    }
}

fn gray(p: usize) -> usize {
    p ^ (p >> 1)
}

fn gray_inverse(mut g: usize) -> usize {
    let mut p = g;
    while g > 1 {
        g >>= 1;
        p ^= g;
    }
    p
}

/// Level for a Gray label on one axis, in units of the axis scale.
fn level(label: usize, levels: usize) -> f64 {
    (levels as f64 - 1.0) - 2.0 * gray_inverse(label) as f64
}

pub fn map_qam(bits: &BitBlock, modulation: Modulation) -> Result<Vec<Complex64>, ModemError> {
    let k = modulation.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(ModemError::Size(format!(
            "{} bits do not split into {k}-bit {modulation} symbols",
            bits.len()
        )));
    }
    let half = k / 2;
    let levels = 1usize << half;
    let scale = axis_scale(modulation);
    let label = |chunk: &[u8]| chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    Ok(bits
        .bits()
        .chunks_exact(k)
        .map(|group| {
            let i = level(label(&group[..half]), levels);
            let q = level(label(&group[half..]), levels);
            Complex64::new(i * scale, q * scale)
        })
        .collect())
}

/// Hard-decision nearest-point demapping.
pub fn demap_qam(symbols: &[Complex64], modulation: Modulation) -> BitBlock {
    let k = modulation.bits_per_symbol();
    let half = k / 2;
    let levels = 1usize << half;
    let scale = axis_scale(modulation);
    let top = (levels - 1) as f64;
    let slice = |v: f64| -> usize {
        let p = ((top - v / scale) / 2.0).round();
        let p = if p.is_nan() { 0.0 } else { p.clamp(0.0, top) };
        gray(p as usize)
    };
    let mut out = Vec::with_capacity(symbols.len() * k);
    for s in symbols {
        for label in [slice(s.re), slice(s.im)] {
            out.extend((0..half).rev().map(|b| ((label >> b) & 1) as u8));
        }
    }
    BitBlock::from_trusted(out, BitRole::Interleaved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn all_patterns(k: usize) -> Vec<u8> {
        (0..1usize << k)
            .flat_map(|v| (0..k).rev().map(move |b| ((v >> b) & 1) as u8))
            .collect()
    }

    #[test]
    fn qpsk_corner() {
        let s = map_qam(&BitBlock::info(vec![0, 0]).unwrap(), Modulation::Qpsk).unwrap();
        assert!((s[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((s[0].im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        let s = map_qam(&BitBlock::info(vec![1, 0]).unwrap(), Modulation::Qpsk).unwrap();
        assert!(s[0].re < 0.0 && s[0].im > 0.0);
    }

    #[test]
    fn unit_average_energy() {
        for m in Modulation::ALL {
            let pts = map_qam(&BitBlock::info(all_patterns(m.bits_per_symbol())).unwrap(), m).unwrap();
            assert_eq!(pts.len(), m.order() as usize);
            let e: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{m}: {e}");
        }
    }

    #[test]
    fn exhaustive_round_trip() {
        for m in Modulation::ALL {
            let bits = BitBlock::info(all_patterns(m.bits_per_symbol())).unwrap();
            let back = demap_qam(&map_qam(&bits, m).unwrap(), m);
            assert_eq!(back.bits(), bits.bits());
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for m in Modulation::ALL {
            let k = m.bits_per_symbol();
            let pts = map_qam(&BitBlock::info(all_patterns(k)).unwrap(), m).unwrap();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, a)| pts.iter().skip(i + 1).map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            for (i, a) in pts.iter().enumerate() {
                for (j, b) in pts.iter().enumerate() {
                    if i != j && ((a - b).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{m}: {i:b} vs {j:b}");
                    }
                }
            }
        }
    }

    #[test]
    fn saturating_decision() {
        let bits = demap_qam(&[Complex64::new(10.0, 10.0)], Modulation::Qpsk);
        assert_eq!(bits.bits(), &[0, 0]);
        let far = demap_qam(&[Complex64::new(-10.0, 10.0)], Modulation::Qam64);
        let corner = map_qam(&far, Modulation::Qam64).unwrap()[0];
        assert!((corner.re + 7.0 / 42f64.sqrt()).abs() < 1e-12);
        assert!((corner.im - 7.0 / 42f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn small_noise_is_harmless_for_64qam() {
        let mut rng = RngStream::new(17);
        for _ in 0..1000 {
            let mut bits = vec![0; 6];
            rng.fill_bits(&mut bits);
            let block = BitBlock::info(bits).unwrap();
            let s = map_qam(&block, Modulation::Qam64).unwrap()[0];
            let (nx, ny) = rng.gaussian_pair();
            let noisy = s + Complex64::new(0.01 * nx, 0.01 * ny);
            assert_eq!(demap_qam(&[noisy], Modulation::Qam64).bits(), block.bits());
        }
    }

    #[test]
    fn size_error() {
        let block = BitBlock::info(vec![0; 5]).unwrap();
        assert!(matches!(map_qam(&block, Modulation::Qam16), Err(ModemError::Size(_))));
    }
}
