//! Rate-1/2 convolutional code, constraint length 7, with hard-decision
//! Viterbi decoding.
//!
//! Register word layout: bit 6 holds the current input, bit 0 the input six
//! steps back. Generator taps are read with the same layout, so octal 171
//! (`1111001`) has impulse response 1,1,1,1,0,0,1.

use super::{BitBlock, BitError, BitRole};

const K: usize = 7;
const MEMORY: usize = K - 1;
const STATES: usize = 1 << MEMORY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCodeSpec {
    pub generators: [u8; 2],
}

impl Default for ConvCodeSpec {
    /// Octal 171 / 133.
    fn default() -> Self {
        Self {
            generators: [0o171, 0o133],
        }
    }
}

impl ConvCodeSpec {
    pub fn new(g1: u8, g2: u8) -> Result<Self, BitError> {
        for g in [g1, g2] {
            if g >= 1 << K || g & (1 << MEMORY) == 0 || g & 1 == 0 {
                return Err(BitError::Size(format!(
                    "generator {g:o} (octal) must use both end taps of a 7-stage register"
                )));
            }
        }
        Ok(Self {
            generators: [g1, g2],
        })
    }

    pub const fn tail_bits(&self) -> usize {
        MEMORY
    }

    pub fn encoded_len(&self, info_len: usize) -> usize {
        2 * (info_len + MEMORY)
    }

    /// Output pair for a full register word, packed as `g1 << 1 | g2`.
    fn output(&self, word: usize) -> u8 {
        let [g1, g2] = self.generators;
        let p1 = (word as u8 & g1).count_ones() as u8 & 1;
        let p2 = (word as u8 & g2).count_ones() as u8 & 1;
        (p1 << 1) | p2
    }
}

/// Encodes and flushes with six zero bits; output is `2 * (len + 6)` bits
/// ordered `(g1, g2)` per input bit.
pub fn conv_encode(block: &BitBlock, spec: &ConvCodeSpec) -> Result<BitBlock, BitError> {
    if block.is_empty() {
        return Err(BitError::Empty);
    }
    let mut out = Vec::with_capacity(spec.encoded_len(block.len()));
    let mut word = 0usize;
    let tail = std::iter::repeat_n(0u8, MEMORY);
    for b in block.bits().iter().copied().chain(tail) {
        word = (word >> 1) | ((b as usize) << MEMORY);
        let pair = spec.output(word);
        out.push(pair >> 1);
        out.push(pair & 1);
    }
    Ok(BitBlock::from_trusted(out, BitRole::Coded))
}

/// Packs 64 bytes, each 0 or 1, into a word with byte `i` at bit `i`.
#[inline]
fn pack_bits(flags: &[u8; 64]) -> u64 {
    const GATHER: u64 = 0x0102_0408_1020_4080;
    flags.chunks_exact(8).enumerate().fold(0u64, |acc, (i, chunk)| {
        let lanes = u64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        acc | ((lanes.wrapping_mul(GATHER) >> 56) << (8 * i))
    })
}

/// Maximum-likelihood (Hamming metric) decode of a tail-terminated codeword.
///
/// Survivors are traced back over the whole block from the zero state. When
/// two predecessors tie, the one whose oldest register bit is 0 wins.
pub fn viterbi_decode(block: &BitBlock, spec: &ConvCodeSpec) -> Result<BitBlock, BitError> {
    let n = block.len();
    if !n.is_multiple_of(2) {
        return Err(BitError::Size(format!("coded length {n} is odd")));
    }
    if n < 2 * (MEMORY + 1) {
        return Err(BitError::Size(format!(
            "coded length {n} is shorter than one bit plus the tail ({})",
            2 * (MEMORY + 1)
        )));
    }
    let steps = n / 2;

    // Hamming distance of each received pair to the pair expected on the u=0
    // branch out of predecessor p. Both generators use tap 6, so the u=1 branch
    // emits the complement and its distance is 2 minus this one.
    debug_assert!(spec.generators.iter().all(|g| g & (1 << MEMORY) != 0));
    // Tables are split by predecessor parity so the add-compare-select loop
    // reads contiguous lanes: predecessors 2j and 2j+1 feed state j (input 0)
    // and state j+32 (input 1).
    const HALF: usize = STATES / 2;
    let mut branch = [[[0i16; HALF]; 2]; 4];
    for (rx, by_parity) in branch.iter_mut().enumerate() {
        for (parity, row) in by_parity.iter_mut().enumerate() {
            for (j, d) in row.iter_mut().enumerate() {
                *d = (rx as u8 ^ spec.output(2 * j + parity)).count_ones() as i16;
            }
        }
    }

    // Metrics grow by at most 2 per step and their spread stays small, so i16
    // suffices with a periodic shift back toward zero.
    const UNREACHED: i16 = 8192;
    const RENORM_EVERY: usize = 1024;
    let mut metric = [UNREACHED; STATES];
    metric[0] = 0;
    let mut decisions: Vec<u64> = Vec::with_capacity(steps);

    for (t, pair) in block.bits().chunks_exact(2).enumerate() {
        if t % RENORM_EVERY == RENORM_EVERY - 1 {
            let floor = metric.iter().copied().min().unwrap_or(0);
            metric.iter_mut().for_each(|m| *m -= floor);
        }
        let [d_even, d_odd] = &branch[((pair[0] << 1) | pair[1]) as usize];
        let mut even = [0i16; HALF];
        let mut odd = [0i16; HALF];
        for j in 0..HALF {
            even[j] = metric[2 * j];
            odd[j] = metric[2 * j + 1];
        }
        let mut take = [0u8; STATES];
        let (lo, hi) = metric.split_at_mut(HALF);
        let (take_lo, take_hi) = take.split_at_mut(HALF);
        for j in 0..HALF {
            // wrapping ops keep the loop branch-free when overflow checks are on
            let (e, o) = (even[j], odd[j]);
            let (a0, a1) = (e.wrapping_add(d_even[j]), o.wrapping_add(d_odd[j]));
            let (b0, b1) = (e.wrapping_add(2 - d_even[j]), o.wrapping_add(2 - d_odd[j]));
            lo[j] = a0.min(a1);
            hi[j] = b0.min(b1);
            take_lo[j] = (a1 < a0) as u8;
            take_hi[j] = (b1 < b0) as u8;
        }
        decisions.push(pack_bits(&take));
    }

    let mut state = 0usize;
    let mut decoded = vec![0u8; steps];
    for t in (0..steps).rev() {
        decoded[t] = (state >> (MEMORY - 1)) as u8;
        let d = ((decisions[t] >> state) & 1) as usize;
        state = ((state << 1) & (STATES - 1)) | d;
    }
    decoded.truncate(steps - MEMORY);
    Ok(BitBlock::from_trusted(decoded, BitRole::Crc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;

    fn random_block(seed: u64, n: usize) -> BitBlock {
        let mut v = vec![0; n];
        RngStream::new(seed).fill_bits(&mut v);
        BitBlock::info(v).unwrap()
    }

    // Independent shift-register trace: reg[0] is the newest bit.
    fn reference_encode(bits: &[u8], taps: [[u8; 7]; 2]) -> Vec<u8> {
        let mut reg = [0u8; 7];
        let mut out = Vec::new();
        for &b in bits.iter().chain([0u8; 6].iter()) {
            reg.rotate_right(1);
            reg[0] = b;
            for g in &taps {
                out.push(reg.iter().zip(g).map(|(r, t)| r & t).fold(0, |a, x| a ^ x));
            }
        }
        out
    }

    const TAPS: [[u8; 7]; 2] = [[1, 1, 1, 1, 0, 0, 1], [1, 0, 1, 1, 0, 1, 1]];

    #[test]
    fn impulse_response() {
        let block = BitBlock::info(vec![1, 0, 0, 0, 0, 0, 0]).unwrap();
        let out = conv_encode(&block, &ConvCodeSpec::default()).unwrap();
        let g1: Vec<u8> = out.bits()[..14].iter().step_by(2).copied().collect();
        let g2: Vec<u8> = out.bits()[1..14].iter().step_by(2).copied().collect();
        assert_eq!(g1, vec![1, 1, 1, 1, 0, 0, 1]);
        assert_eq!(g2, vec![1, 0, 1, 1, 0, 1, 1]);
        assert_eq!(out.bits(), reference_encode(block.bits(), TAPS).as_slice());
    }

    #[test]
    fn matches_reference_register() {
        let block = random_block(8, 500);
        let ours = conv_encode(&block, &ConvCodeSpec::default()).unwrap();
        assert_eq!(ours.bits(), reference_encode(block.bits(), TAPS).as_slice());
    }

    #[test]
    fn lengths() {
        let spec = ConvCodeSpec::default();
        let zeros = conv_encode(&BitBlock::info(vec![0; 10]).unwrap(), &spec).unwrap();
        assert_eq!(zeros.len(), 32);
        assert!(zeros.bits().iter().all(|&b| b == 0));
        assert_eq!(spec.encoded_len(44_000), 88_012);
        assert_eq!(conv_encode(&random_block(1, 44_000), &spec).unwrap().len(), 88_012);
    }

    #[test]
    fn noiseless_decode() {
        let spec = ConvCodeSpec::default();
        let block = random_block(9, 1000);
        let decoded = viterbi_decode(&conv_encode(&block, &spec).unwrap(), &spec).unwrap();
        assert_eq!(decoded.bits(), block.bits());
        let zeros = viterbi_decode(&BitBlock::info(vec![0; 200]).unwrap(), &spec).unwrap();
        assert!(zeros.bits().iter().all(|&b| b == 0));
        assert_eq!(zeros.len(), 94);
    }

    #[test]
    fn corrects_two_scattered_errors() {
        let spec = ConvCodeSpec::default();
        let mut rng = RngStream::new(10);
        for trial in 0..100 {
            let block = random_block(100 + trial, 1000);
            let mut coded = conv_encode(&block, &spec).unwrap().into_bits();
            let i = (rng.uniform() * coded.len() as f64) as usize;
            let mut j = i;
            while j == i {
                j = (rng.uniform() * coded.len() as f64) as usize;
            }
            coded[i] ^= 1;
            coded[j] ^= 1;
            let decoded = viterbi_decode(&BitBlock::info(coded).unwrap(), &spec).unwrap();
            assert_eq!(decoded.bits(), block.bits(), "trial {trial}");
        }
    }

    #[test]
    fn size_errors() {
        let spec = ConvCodeSpec::default();
        assert!(matches!(
            viterbi_decode(&BitBlock::info(vec![0; 15]).unwrap(), &spec),
            Err(BitError::Size(_))
        ));
        assert!(viterbi_decode(&BitBlock::info(vec![0; 12]).unwrap(), &spec).is_err());
        assert_eq!(conv_encode(&BitBlock::info(vec![]).unwrap(), &spec), Err(BitError::Empty));
        assert!(ConvCodeSpec::new(0o171, 0o132).is_err());
        assert!(ConvCodeSpec::new(0o71, 0o133).is_err());
    }

    proptest! {
        #[test]
        fn encoder_is_linear(seed in any::<u64>(), n in 1usize..300) {
            let spec = ConvCodeSpec::default();
            let x = random_block(seed, n);
            let y = random_block(seed ^ 0xdead, n);
            let xy = BitBlock::info(x.bits().iter().zip(y.bits()).map(|(a, b)| a ^ b).collect()).unwrap();
            let ex = conv_encode(&x, &spec).unwrap();
            let ey = conv_encode(&y, &spec).unwrap();
            let sum: Vec<u8> = ex.bits().iter().zip(ey.bits()).map(|(a, b)| a ^ b).collect();
            let exy = conv_encode(&xy, &spec).unwrap();
            prop_assert_eq!(exy.bits(), sum.as_slice());
        }

        #[test]
        fn decoded_length_bound(bits in prop::collection::vec(0u8..2, 14..600)) {
            let len = bits.len() & !1;
            let out = viterbi_decode(&BitBlock::info(bits[..len].to_vec()).unwrap(), &ConvCodeSpec::default()).unwrap();
            prop_assert!(out.len() <= len / 2 - 6);
        }
    }
}
