//! Cyclic redundancy check by polynomial division over GF(2).
//!
//! The checksum is the remainder of `m(x) * x^w` modulo the generator, with a
//! zero initial register, appended MSB first. A block verifies when its whole
//! remainder is zero.

use super::{BitBlock, BitError, BitRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcSpec {
    /// Generator including the leading `x^width` term.
    pub generator: u32,
    pub width: u32,
}

impl CrcSpec {
    /// CRC-16-CCITT, `x^16 + x^12 + x^5 + 1`.
    pub const CCITT16: CrcSpec = CrcSpec {
        generator: 0x1_1021,
        width: 16,
    };

    pub fn new(generator: u32, width: u32) -> Result<Self, BitError> {
        if width == 0 || width > 31 || generator >> width != 1 || generator & 1 == 0 {
            return Err(BitError::Size(format!(
                "generator {generator:#x} is not a degree-{width} polynomial with constant term"
            )));
        }
        Ok(Self { generator, width })
    }

    /// Remainder of the bit sequence (MSB first) modulo the generator.
    pub fn remainder(&self, bits: &[u8]) -> u32 {
        let top = 1u32 << (self.width - 1);
        let mask = (1u32 << self.width) - 1;
        let low = self.generator & mask;
        let mut reg = 0u32;
        for &b in bits {
            let out = reg & top != 0;
            reg = ((reg << 1) | b as u32) & mask;
            if out {
                reg ^= low;
            }
        }
        reg
    }

    /// Checksum of `bits`: remainder of `bits * x^width`.
    pub fn checksum(&self, bits: &[u8]) -> u32 {
        let top = 1u32 << (self.width - 1);
        let mask = (1u32 << self.width) - 1;
        let low = self.generator & mask;
        let mut reg = 0u32;
        for &b in bits {
            let fb = ((reg & top != 0) as u8) ^ b;
            reg = (reg << 1) & mask;
            if fb != 0 {
                reg ^= low;
            }
        }
        reg
    }

    pub fn append(&self, bits: &[u8]) -> Vec<u8> {
        let crc = self.checksum(bits);
        let mut out = Vec::with_capacity(bits.len() + self.width as usize);
        out.extend_from_slice(bits);
        out.extend((0..self.width).rev().map(|i| ((crc >> i) & 1) as u8));
        out
    }
}

pub fn crc_append(block: &BitBlock) -> Result<BitBlock, BitError> {
    if block.is_empty() {
        return Err(BitError::Empty);
    }
    Ok(BitBlock::from_trusted(
        CrcSpec::CCITT16.append(block.bits()),
        BitRole::Crc,
    ))
}

pub fn crc_verify(block: &BitBlock) -> Result<bool, BitError> {
    let width = CrcSpec::CCITT16.width as usize;
    if block.len() <= width {
        return Err(BitError::Size(format!(
            "CRC-protected block must be longer than {width} bits, got {}",
            block.len()
        )));
    }
    Ok(CrcSpec::CCITT16.remainder(block.bits()) == 0)
}

/// Drops the checksum, returning the payload and whether it verified.
pub fn crc_strip(block: &BitBlock) -> Result<(BitBlock, bool), BitError> {
    let ok = crc_verify(block)?;
    let payload = block.bits()[..block.len() - CrcSpec::CCITT16.width as usize].to_vec();
    Ok((BitBlock::from_trusted(payload, BitRole::Info), ok))
}
