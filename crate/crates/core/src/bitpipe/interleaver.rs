//! Row-in, column-out block interleaver.

use super::{BitBlock, BitError, BitRole};

fn check(len: usize, ncols: usize) -> Result<usize, BitError> {
    if ncols == 0 || !len.is_multiple_of(ncols) {
        return Err(BitError::Size(format!(
            "block length {len} is not a multiple of {ncols} columns"
        )));
    }
    Ok(len / ncols)
}

/// Writes row-major into `ncols` columns and reads column-major: input bit `i`
/// lands at `(i mod ncols) * rows + i / ncols`.
pub fn interleave(block: &BitBlock, ncols: usize) -> Result<BitBlock, BitError> {
    let rows = check(block.len(), ncols)?;
    let mut out = vec![0u8; block.len()];
    for (i, &b) in block.bits().iter().enumerate() {
        out[(i % ncols) * rows + i / ncols] = b;
    }
    Ok(BitBlock::from_trusted(out, BitRole::Interleaved))
}

pub fn deinterleave(block: &BitBlock, ncols: usize) -> Result<BitBlock, BitError> {
    let rows = check(block.len(), ncols)?;
    let bits = block.bits();
    let out = (0..block.len())
        .map(|i| bits[(i % ncols) * rows + i / ncols])
        .collect();
    Ok(BitBlock::from_trusted(out, BitRole::Coded))
}
