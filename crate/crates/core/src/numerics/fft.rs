//! Iterative radix-2 FFT.
//!
//! Forward transform is unscaled, inverse is scaled by `1/N`, so that
//! `inverse(forward(x)) == x`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::NumericsError;

/// Precomputed twiddles and bit-reversal table for one transform length.
///
/// Twiddles are stored stage by stage: the stage with butterfly span `h`
/// occupies `[h - 1, 2h - 1)`, so each stage reads a contiguous slice.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    inverse_twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self, NumericsError> {
        if len < 2 || !len.is_power_of_two() {
            return Err(NumericsError::Size(format!(
                "fft length must be a power of two >= 2, got {len}"
            )));
        }
        let mut twiddles = Vec::with_capacity(len - 1);
        let mut half = 1;
        while half < len {
            twiddles.extend(
                (0..half).map(|k| Complex64::from_polar(1.0, -PI * k as f64 / half as f64)),
            );
            half *= 2;
        }
        let inverse_twiddles = twiddles.iter().map(|w| w.conj()).collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        Ok(Self {
            len,
            twiddles,
            inverse_twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward DFT: `X[k] = sum_n x[n] e^{-2 pi i k n / N}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse DFT including the `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len, "buffer length does not match plan");
        for i in 0..self.len {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let twiddles = if inverse {
            &self.inverse_twiddles
        } else {
            &self.twiddles
        };
        let mut half = 1;
        while half < self.len {
            let stage = &twiddles[half - 1..2 * half - 1];
            for block in data.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(stage) {
                    let t = *b * *w;
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
    }
}

/// One-shot transform. Builds a plan per call; reuse [`FftPlan`] in loops.
pub fn fft(x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>, NumericsError> {
    let plan = FftPlan::new(x.len())?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(NumericsError::Domain("fft input contains non-finite values".into()));
    }
    let mut out = x.to_vec();
    if inverse {
        plan.inverse(&mut out);
    } else {
        plan.forward(&mut out);
    }
    Ok(out)
}
