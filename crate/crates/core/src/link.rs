//! End-to-end burst simulation and Monte Carlo BER estimation.
//!
//! A burst carries `total_info_bits` information bits through
//! randomize -> [CRC -> conv encode] -> zero pad -> per-symbol interleave ->
//! QAM map -> OFDM, then through the channel, and back through the inverse
//! chain with perfect-CSI equalization. Errors are counted on information
//! bits after the CRC is stripped; a failed CRC does not discard the burst.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::bitpipe::{
    conv_encode, crc_append, crc_strip, deinterleave, interleave, randomize, viterbi_decode, BitBlock,
    BitError, BitRole, ConvCodeSpec, CrcSpec, DEFAULT_RANDOMIZER_SEED,
};
use crate::channel::{add_awgn_in_place, make_gain_sequence, ChannelError, ChannelKind, ChannelSpec, FadingGain};
use crate::modem::{demap_qam, equalize, map_qam, ModemError, ModemParams, Modulation, OfdmModem};
use crate::numerics::{derive_seed, RngStream};

pub const DEFAULT_INFO_BITS: usize = 44_000;
pub const DEFAULT_MIN_ERRORS: u64 = 100;
pub const DEFAULT_MAX_BITS: u64 = 20_000_000;
pub const SNR_RANGE_DB: (f64, f64) = (-10.0, 60.0);
const INTERLEAVER_ROWS: usize = 16;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("size error: {0}")]
    Size(String),
    #[error(transparent)]
    Bits(#[from] BitError),
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_errors: DEFAULT_MIN_ERRORS,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub total_info_bits: usize,
    pub modem: ModemParams,
    pub channel: ChannelSpec,
    pub coding_enabled: bool,
    pub snr_grid: Vec<f64>,
    pub randomizer_seed: u16,
    pub rng_seed: u64,
    pub stop_rule: StopRule,
}

impl SimConfig {
    /// 44000 bits, 256/200/CP 1/4, CRC + CC on, SNR 0..=30 dB.
    pub fn table1(modulation: Modulation, channel: ChannelKind) -> Self {
        Self {
            total_info_bits: DEFAULT_INFO_BITS,
            modem: ModemParams::table1(modulation),
            channel: ChannelSpec::for_kind(channel),
            coding_enabled: true,
            snr_grid: snr_range(0.0, 1.0, 30.0),
            randomizer_seed: DEFAULT_RANDOMIZER_SEED,
            rng_seed: 1,
            stop_rule: StopRule::default(),
        }
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        if self.total_info_bits == 0 {
            return Err(LinkError::Config("total_info_bits must be >= 1".into()));
        }
        if let Some(bad) = self.snr_grid.iter().find(|s| !(SNR_RANGE_DB.0..=SNR_RANGE_DB.1).contains(*s)) {
            return Err(LinkError::Config(format!(
                "SNR {bad} dB outside [{}, {}]",
                SNR_RANGE_DB.0, SNR_RANGE_DB.1
            )));
        }
        if self.stop_rule.min_errors == 0 {
            return Err(LinkError::Config("min_errors must be >= 1".into()));
        }
        if self.stop_rule.max_bits < self.total_info_bits as u64 {
            return Err(LinkError::Config(format!(
                "max_bits {} is smaller than one burst of {} bits",
                self.stop_rule.max_bits, self.total_info_bits
            )));
        }
        if self.randomizer_seed == 0 || self.randomizer_seed > 0x7fff {
            return Err(LinkError::Bits(BitError::InvalidSeed(self.randomizer_seed)));
        }
        self.channel.validate()?;
        Ok(())
    }

    pub fn layout(&self) -> FrameLayout {
        FrameLayout::new(self)
    }
}

/// `min, min + step, ...` up to and including `max` (within 1e-9).
pub fn snr_range(min: f64, step: f64, max: f64) -> Vec<f64> {
    if step <= 0.0 || max < min {
        return vec![min];
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

/// Bit counts for one burst.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub info_bits: usize,
    /// Bits entering the padder: coded length, or info length when uncoded.
    pub channel_bits: usize,
    pub bits_per_symbol: usize,
    pub n_symbols: usize,
    pub pad_bits: usize,
    pub interleaver_cols: usize,
}

impl FrameLayout {
    fn new(config: &SimConfig) -> Self {
        let info_bits = config.total_info_bits;
        let channel_bits = if config.coding_enabled {
            ConvCodeSpec::default().encoded_len(info_bits + CrcSpec::CCITT16.width as usize)
        } else {
            info_bits
        };
        let bits_per_symbol = config.modem.bits_per_ofdm_symbol();
        let n_symbols = channel_bits.div_ceil(bits_per_symbol);
        let rows = (1..=INTERLEAVER_ROWS)
            .rev()
            .find(|r| bits_per_symbol.is_multiple_of(*r))
            .unwrap_or(1);
        Self {
            info_bits,
            channel_bits,
            bits_per_symbol,
            n_symbols,
            pad_bits: n_symbols * bits_per_symbol - channel_bits,
            interleaver_cols: bits_per_symbol / rows,
        }
    }

    /// Information bits per transmitted channel bit, counting CRC, tail and padding.
    pub fn code_rate(&self) -> f64 {
        self.info_bits as f64 / (self.n_symbols * self.bits_per_symbol) as f64
    }
}

/// `10 log10(k * R * n_used / (n_fft + cp))`: dB between SNR and Eb/N0 when
/// the energy of every transmitted sample is charged to the information bits.
pub fn ebn0_offset_db(bits_per_subcarrier: f64, code_rate: f64, n_used: usize, n_fft: usize, cp_len: usize) -> f64 {
    10.0 * (bits_per_subcarrier * code_rate * n_used as f64 / (n_fft + cp_len) as f64).log10()
}

pub fn snr_to_ebn0(config: &SimConfig, snr_db: f64) -> f64 {
    let m = &config.modem;
    snr_db
        - ebn0_offset_db(
            m.modulation.bits_per_symbol() as f64,
            config.layout().code_rate(),
            m.n_used,
            m.n_fft,
            m.cp_len,
        )
}

/// SNR at which each channel bit reaches the demapper with the given Eb/N0.
///
/// Unlike [`snr_to_ebn0`] this ignores the energy spent on the cyclic prefix
/// and on coding overhead, which is the reference point of the uncoded
/// closed-form curves.
pub fn snr_for_channel_bit_ebn0(modem: &ModemParams, ebn0_db: f64) -> f64 {
    ebn0_db + 10.0 * (modem.modulation.bits_per_symbol() as f64 * modem.n_used as f64 / modem.n_fft as f64).log10()
}

/// Receiver output for one burst.
#[derive(Debug, Clone, PartialEq)]
pub struct RxFrame {
    pub bits: BitBlock,
    /// Some symbol had a gain too small to equalize.
    pub erased: bool,
    /// CRC verdict when coding is on.
    pub crc_ok: Option<bool>,
}

/// Transmitter and receiver for one configuration.
#[derive(Debug, Clone)]
pub struct Link {
    config: SimConfig,
    layout: FrameLayout,
    modem: OfdmModem,
    code: ConvCodeSpec,
}

impl Link {
    pub fn new(config: SimConfig) -> Result<Self, LinkError> {
        config.validate()?;
        let layout = config.layout();
        let modem = OfdmModem::new(config.modem)?;
        Ok(Self {
            config,
            layout,
            modem,
            code: ConvCodeSpec::default(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    /// Channel bit stream (before padding) for an info block.
    pub fn encode(&self, info: &BitBlock) -> Result<BitBlock, LinkError> {
        if info.len() != self.layout.info_bits {
            return Err(LinkError::Size(format!(
                "expected {} info bits, got {}",
                self.layout.info_bits,
                info.len()
            )));
        }
        let scrambled = randomize(info, self.config.randomizer_seed)?;
        if self.config.coding_enabled {
            Ok(conv_encode(&crc_append(&scrambled)?, &self.code)?)
        } else {
            Ok(scrambled.with_role(BitRole::Coded))
        }
    }

    /// One time-domain OFDM symbol (with CP) per entry.
    pub fn transmit(&self, info: &BitBlock) -> Result<Vec<Vec<Complex64>>, LinkError> {
        let mut stream = self.encode(info)?.into_bits();
        stream.resize(self.layout.n_symbols * self.layout.bits_per_symbol, 0);
        let modulation = self.config.modem.modulation;
        stream
            .chunks_exact(self.layout.bits_per_symbol)
            .map(|chunk| {
                let block = BitBlock::new(chunk.to_vec(), BitRole::Coded)?;
                let frame = map_qam(&interleave(&block, self.layout.interleaver_cols)?, modulation)?;
                Ok(self.modem.modulate(&frame)?)
            })
            .collect()
    }

    pub fn receive(&self, received: &[Vec<Complex64>], gains: &[FadingGain]) -> Result<RxFrame, LinkError> {
        if received.len() != gains.len() {
            return Err(LinkError::Size(format!(
                "{} received symbols but {} gains",
                received.len(),
                gains.len()
            )));
        }
        if received.len() != self.layout.n_symbols {
            return Err(LinkError::Size(format!(
                "expected {} OFDM symbols, got {}",
                self.layout.n_symbols,
                received.len()
            )));
        }
        let modulation = self.config.modem.modulation;
        let mut erased = false;
        let mut stream = Vec::with_capacity(self.layout.n_symbols * self.layout.bits_per_symbol);
        for (samples, gain) in received.iter().zip(gains) {
            let frame = self.modem.demodulate(samples)?;
            let bits = match equalize(&frame, gain.h) {
                Ok(eq) => deinterleave(&demap_qam(&eq, modulation), self.layout.interleaver_cols)?,
                Err(ModemError::SingularChannel(_)) => {
                    erased = true;
                    BitBlock::new(vec![0; self.layout.bits_per_symbol], BitRole::Coded)?
                }
                Err(e) => return Err(e.into()),
            };
            stream.extend_from_slice(bits.bits());
        }
        stream.truncate(self.layout.channel_bits);
        let channel = BitBlock::new(stream, BitRole::Coded)?;

        let (scrambled, crc_ok) = if self.config.coding_enabled {
            let (payload, ok) = crc_strip(&viterbi_decode(&channel, &self.code)?)?;
            (payload, Some(ok))
        } else {
            (channel.with_role(BitRole::Info), None)
        };
        Ok(RxFrame {
            bits: randomize(&scrambled, self.config.randomizer_seed)?,
            erased,
            crc_ok,
        })
    }

    /// Simulates one burst with fresh random info bits written into `info`
    /// (length `layout().info_bits`). Returns `(bit errors, erased, crc_failed)`.
    pub fn run_burst(&self, snr_db: f64, rng: &mut RngStream, info: &mut [u8]) -> Result<(u64, bool, bool), LinkError> {
        rng.fill_bits(info);
        let block = BitBlock::new(info.to_vec(), BitRole::Info)?;
        let mut symbols = self.transmit(&block)?;
        let gains = make_gain_sequence(&self.config.channel, symbols.len(), rng)?;
        let signal_power = burst_power(&symbols);
        for (sym, g) in symbols.iter_mut().zip(&gains) {
            if self.config.channel.kind != ChannelKind::Awgn {
                for v in sym.iter_mut() {
                    *v *= g.h;
                }
            }
            add_awgn_in_place(sym, snr_db, signal_power, rng)?;
        }
        let rx = self.receive(&symbols, &gains)?;
        let errors = if rx.erased {
            info.len() as u64
        } else {
            rx.bits.bits().iter().zip(info.iter()).filter(|(a, b)| a != b).count() as u64
        };
        Ok((errors, rx.erased, rx.crc_ok == Some(false)))
    }

    /// Runs bursts until the stop rule is met. A noiseless point
    /// (`snr_db = +inf`) runs exactly one burst.
    pub fn run_point(&self, snr_db: f64, rng: &mut RngStream) -> Result<BerPoint, LinkError> {
        let n = self.layout.info_bits as u64;
        let rule = self.config.stop_rule;
        let mut info = vec![0u8; self.layout.info_bits];
        let mut point = BerPoint {
            snr_db,
            ebn0_db: snr_to_ebn0(&self.config, snr_db),
            ..BerPoint::default()
        };
        loop {
            let (errors, erased, crc_failed) = self.run_burst(snr_db, rng, &mut info)?;
            point.bits_simulated += n;
            point.bit_errors += errors;
            point.frames += 1;
            point.frames_erased += erased as u64;
            point.crc_failures += crc_failed as u64;
            if snr_db == f64::INFINITY
                || point.bit_errors >= rule.min_errors
                || point.bits_simulated >= rule.max_bits
            {
                break;
            }
        }
        point.ber = point.bit_errors as f64 / point.bits_simulated as f64;
        Ok(point)
    }
}

fn burst_power(symbols: &[Vec<Complex64>]) -> f64 {
    let (sum, count) = symbols.iter().fold((0.0, 0usize), |(s, c), sym| {
        (s + sym.iter().map(|v| v.norm_sqr()).sum::<f64>(), c + sym.len())
    });
    sum / count as f64
}

/// One point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frames: u64,
    pub frames_erased: u64,
    pub crc_failures: u64,
}

impl BerPoint {
    /// Smallest nonzero BER this point could have resolved.
    pub fn resolution_floor(&self) -> f64 {
        1.0 / self.bits_simulated as f64
    }

    /// `Some(floor)` when no errors were seen.
    pub fn zero_error_floor(&self) -> Option<f64> {
        (self.bit_errors == 0).then(|| self.resolution_floor())
    }

    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        (self.ber * (1.0 - self.ber) / self.bits_simulated as f64).sqrt()
    }
}

pub fn tx_chain(info: &BitBlock, config: &SimConfig) -> Result<Vec<Vec<Complex64>>, LinkError> {
    Link::new(config.clone())?.transmit(info)
}

pub fn rx_chain(received: &[Vec<Complex64>], gains: &[FadingGain], config: &SimConfig) -> Result<RxFrame, LinkError> {
    Link::new(config.clone())?.receive(received, gains)
}

pub fn run_ber_point(config: &SimConfig, snr_db: f64, rng: &mut RngStream) -> Result<BerPoint, LinkError> {
    Link::new(config.clone())?.run_point(snr_db, rng)
}

/// One point per grid value; point `i` uses the stream seeded with
/// `derive_seed(rng_seed, i)`. Points run in parallel and come back in grid order.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<BerPoint>, LinkError> {
    if config.snr_grid.is_empty() {
        return Err(LinkError::Config("SNR grid is empty".into()));
    }
    let link = Link::new(config.clone())?;
    config
        .snr_grid
        .par_iter()
        .enumerate()
        .map(|(i, &snr)| {
            let mut rng = RngStream::new(derive_seed(config.rng_seed, i as u64));
            link.run_point(snr, &mut rng)
        })
        .collect()
}
