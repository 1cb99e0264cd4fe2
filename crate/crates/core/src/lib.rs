//! Link-level simulator for an IEEE 802.16-style OFDM physical layer.
//!
//! Bits are scrambled, optionally protected by a CRC-16 and a rate-1/2 K=7
//! convolutional code, interleaved, QAM-mapped onto 200 of 256 subcarriers and
//! sent as OFDM symbols with a 1/4 cyclic prefix through an AWGN, Rayleigh or
//! Rician channel. [`link::run_sweep`] estimates BER across an SNR grid.

pub mod bitpipe;
pub mod channel;
pub mod cli;
pub mod link;
pub mod modem;
pub mod numerics;

pub use channel::{ChannelKind, ChannelSpec};
pub use link::{run_ber_point, run_sweep, BerPoint, SimConfig, StopRule};
pub use modem::{ModemParams, Modulation};
