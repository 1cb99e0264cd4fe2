//! PRBS scrambler with generator `1 + x^14 + x^15`.

use super::{BitBlock, BitError};

/// All-ones register.
pub const DEFAULT_RANDOMIZER_SEED: u16 = 0x7fff;

/// First `len` output bits of the scrambler LFSR started from `seed`.
pub fn prbs(seed: u16, len: usize) -> Result<Vec<u8>, BitError> {
    if seed == 0 || seed > 0x7fff {
        return Err(BitError::InvalidSeed(seed));
    }
    let mut state = seed;
    Ok((0..len)
        .map(|_| {
            let fb = ((state >> 13) ^ (state >> 14)) & 1;
            state = ((state << 1) | fb) & 0x7fff;
            fb as u8
        })
        .collect())
}

/// XORs the block with the PRBS. Applying it twice with the same seed restores
/// the input.
pub fn randomize(block: &BitBlock, seed: u16) -> Result<BitBlock, BitError> {
    if block.is_empty() {
        return Err(BitError::Empty);
    }
    let seq = prbs(seed, block.len())?;
    let bits = block.bits().iter().zip(seq).map(|(b, p)| b ^ p).collect();
    Ok(BitBlock::from_trusted(bits, block.role()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitpipe::BitRole;

    const PERIOD: usize = (1 << 15) - 1;

    // Reference LFSR with an explicit stage array: stage[0] is x^1 ... stage[14] is x^15.
    fn reference_prbs(seed: u16, len: usize) -> Vec<u8> {
        let mut stage: Vec<u8> = (0..15).map(|i| ((seed >> i) & 1) as u8).collect();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let fb = stage[13] ^ stage[14];
            for i in (1..15).rev() {
                stage[i] = stage[i - 1];
            }
            stage[0] = fb;
            out.push(fb);
        }
        out
    }

    #[test]
    fn matches_reference_register() {
        for seed in [1u16, 0x7fff, 0x1234, 0b011011100010101] {
            assert_eq!(prbs(seed, 5000).unwrap(), reference_prbs(seed, 5000));
        }
    }

    #[test]
    fn full_period_balance() {
        let seq = reference_prbs(DEFAULT_RANDOMIZER_SEED, PERIOD);
        assert_eq!(seq.iter().filter(|&&b| b == 1).count(), 16384);
        let ours = prbs(DEFAULT_RANDOMIZER_SEED, 2 * PERIOD).unwrap();
        assert_eq!(ours.iter().take(PERIOD).filter(|&&b| b == 1).count(), 16384);
        assert_eq!(&ours[..PERIOD], &ours[PERIOD..]);
        // no shorter period
        for p in (1..PERIOD).filter(|p| PERIOD.is_multiple_of(*p)) {
            assert!((0..PERIOD).any(|i| ours[i] != ours[i + p]), "period {p}");
        }
    }

    #[test]
    fn zeros_yield_prbs() {
        let zeros = BitBlock::info(vec![0; 300]).unwrap();
        let out = randomize(&zeros, 0x4321).unwrap();
        assert_eq!(out.bits(), prbs(0x4321, 300).unwrap().as_slice());
    }

    #[test]
    fn involution() {
        let block = BitBlock::info((0..1000).map(|i| (i * 7 % 3 == 0) as u8).collect()).unwrap();
        let twice = randomize(&randomize(&block, 77).unwrap(), 77).unwrap();
        assert_eq!(twice, block);
        assert_eq!(twice.role(), BitRole::Info);
    }

    #[test]
    fn errors() {
        let block = BitBlock::info(vec![1; 8]).unwrap();
        assert_eq!(randomize(&block, 0), Err(BitError::InvalidSeed(0)));
        assert_eq!(randomize(&block, 0x8000), Err(BitError::InvalidSeed(0x8000)));
        assert_eq!(randomize(&BitBlock::info(vec![]).unwrap(), 1), Err(BitError::Empty));
    }
}
