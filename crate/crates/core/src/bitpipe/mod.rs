//! Bit-domain processing: scrambling, CRC, convolutional coding and
//! interleaving, plus their receive-side inverses.

mod conv;
mod crc;
mod interleaver;
mod randomizer;

use thiserror::Error;

pub use conv::{conv_encode, viterbi_decode, ConvCodeSpec};
pub use crc::{crc_append, crc_strip, crc_verify, CrcSpec};
pub use interleaver::{deinterleave, interleave};
pub use randomizer::{prbs, randomize, DEFAULT_RANDOMIZER_SEED};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitError {
    #[error("empty bit block")]
    Empty,
    #[error("randomizer seed must be a nonzero 15-bit value, got {0:#x}")]
    InvalidSeed(u16),
    #[error("size error: {0}")]
    Size(String),
    #[error("bit value {value} at index {index} is not 0 or 1")]
    NotBinary { index: usize, value: u8 },
}

/// Where a block sits in the transmit pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitRole {
    Info,
    Crc,
    Coded,
    Interleaved,
}

/// Ordered bits, one per byte, each exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock {
    bits: Vec<u8>,
    role: BitRole,
}

impl BitBlock {
    pub fn new(bits: Vec<u8>, role: BitRole) -> Result<Self, BitError> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(BitError::NotBinary { index, value });
        }
        Ok(Self { bits, role })
    }

    pub fn info(bits: Vec<u8>) -> Result<Self, BitError> {
        Self::new(bits, BitRole::Info)
    }

    pub(crate) fn from_trusted(bits: Vec<u8>, role: BitRole) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self { bits, role }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub fn role(&self) -> BitRole {
        self.role
    }

    pub fn with_role(self, role: BitRole) -> Self {
        Self { role, ..self }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}
