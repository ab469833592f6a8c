//! Prefix-coded dictionary IDs.
//!
//! Primary space (dynamic dictionary alone, or the preset dictionary):
//!
//! ```text
//! 0xxxxxxx                      ids 0 ..= 127
//! 10xxxxxx xxxxxxxx             128 + 14-bit offset
//! 110xxxxx xxxxxxxx xxxxxxxx    16512 + 21-bit offset
//! ```
//!
//! RAM space next to a preset dictionary:
//!
//! ```text
//! 1110xxxx xxxxxxxx             ids 0 ..= 4095
//! 1111xxxx xxxxxxxx xxxxxxxx    4096 + 20-bit offset, first byte never 0xFF
//! ```
//!
//! A leading 0xFF is a control token.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdSpace {
    Primary,
    HybridRam,
}

const ONE_BYTE: u64 = 1 << 7;
const TWO_BYTE: u64 = ONE_BYTE + (1 << 14);
pub const PRIMARY_ID_LIMIT: u64 = TWO_BYTE + (1 << 21);

const RAM_TWO_BYTE: u64 = 1 << 12;
pub const HYBRID_RAM_ID_LIMIT: u64 = RAM_TWO_BYTE + 15 * (1 << 16);

impl IdSpace {
    /// One past the largest encodable ID.
    pub fn limit(self) -> u64 {
        match self {
            IdSpace::Primary => PRIMARY_ID_LIMIT,
            IdSpace::HybridRam => HYBRID_RAM_ID_LIMIT,
        }
    }

    /// Encoded length of `id`, if it fits.
    pub fn encoded_len(self, id: u64) -> Option<usize> {
        match self {
            IdSpace::Primary if id < ONE_BYTE => Some(1),
            IdSpace::Primary if id < TWO_BYTE => Some(2),
            IdSpace::Primary if id < PRIMARY_ID_LIMIT => Some(3),
            IdSpace::HybridRam if id < RAM_TWO_BYTE => Some(2),
            IdSpace::HybridRam if id < HYBRID_RAM_ID_LIMIT => Some(3),
            _ => None,
        }
    }
}

pub fn encode_id(id: u64, space: IdSpace, out: &mut Vec<u8>) -> Result<()> {
    match (space, space.encoded_len(id)) {
        (_, None) => return Err(Error::SpaceExhausted(id)),
        (IdSpace::Primary, Some(1)) => out.push(id as u8),
        (IdSpace::Primary, Some(2)) => {
            let v = id - ONE_BYTE;
            out.extend_from_slice(&[0x80 | (v >> 8) as u8, v as u8]);
        }
        (IdSpace::Primary, Some(_)) => {
            let v = id - TWO_BYTE;
            out.extend_from_slice(&[0xC0 | (v >> 16) as u8, (v >> 8) as u8, v as u8]);
        }
        (IdSpace::HybridRam, Some(2)) => {
            out.extend_from_slice(&[0xE0 | (id >> 8) as u8, id as u8]);
        }
        (IdSpace::HybridRam, Some(_)) => {
            let v = id - RAM_TWO_BYTE;
            out.extend_from_slice(&[0xF0 | (v >> 16) as u8, (v >> 8) as u8, v as u8]);
        }
    }
    Ok(())
}

/// Which space a leading byte belongs to; `None` for the 0xFF control prefix.
pub fn space_of(first: u8) -> Option<IdSpace> {
    match first {
        0x00..=0xDF => Some(IdSpace::Primary),
        0xE0..=0xFE => Some(IdSpace::HybridRam),
        0xFF => None,
    }
}

/// Decodes one ID from the front of `bytes`, returning it with the byte count.
pub fn decode_id(bytes: &[u8], space: IdSpace) -> Result<(u64, usize)> {
    let first = *bytes
        .first()
        .ok_or_else(|| Error::Truncated("expected an id".into()))?;
    if space_of(first) != Some(space) {
        return Err(Error::UnknownToken(first, 0));
    }
    let len = match first {
        0x00..=0x7F => 1,
        0x80..=0xBF => 2,
        0xC0..=0xDF => 3,
        0xE0..=0xEF => 2,
        _ => 3,
    };
    if bytes.len() < len {
        return Err(Error::Truncated("id cut short".into()));
    }
    let tail = bytes[1..len]
        .iter()
        .fold(0u64, |acc, &b| (acc << 8) | b as u64);
    let id = match first {
        0x00..=0x7F => first as u64,
        0x80..=0xBF => ONE_BYTE + (((first & 0x3F) as u64) << 8 | tail),
        0xC0..=0xDF => TWO_BYTE + (((first & 0x1F) as u64) << 16 | tail),
        0xE0..=0xEF => ((first & 0x0F) as u64) << 8 | tail,
        _ => RAM_TWO_BYTE + (((first & 0x0F) as u64) << 16 | tail),
    };
    Ok((id, len))
}
