//! Fixed-length bit strings packed MSB-first.

use std::fmt;
use std::str::FromStr;

use crate::error::{param, Error, Result};

/// A bit string of fixed length, packed MSB-first into bytes.
///
/// Bit 0 is the most significant bit of the first byte. Bits past `len`
/// in the last byte are always zero, so two `Bits` with equal contents
/// compare equal byte-wise.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

pub(crate) fn byte_len(bits: usize) -> usize {
    bits.div_ceil(8)
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            bytes: vec![0; byte_len(len)],
            len,
        }
    }

    /// Wraps packed bytes. Fails if the byte count does not match `len` or
    /// if any padding bit is set.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != byte_len(len) {
            return Err(param(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let bits = Bits { bytes, len };
        if bits.pad_mask() & bits.bytes.last().copied().unwrap_or(0) != 0 {
            return Err(Error::Corrupt("nonzero padding bits".into()));
        }
        Ok(bits)
    }

    /// Takes the first `len` bits of `bytes`, clearing the rest of the last byte.
    pub fn from_prefix(bytes: &[u8], len: usize) -> Self {
        let mut bits = Bits {
            bytes: bytes[..byte_len(len)].to_vec(),
            len,
        };
        let mask = bits.pad_mask();
        if let Some(last) = bits.bytes.last_mut() {
            *last &= !mask;
        }
        bits
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    // Low bits of the final byte that lie beyond `len`.
    fn pad_mask(&self) -> u8 {
        match self.len % 8 {
            0 => 0,
            r => 0xFF >> r,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 0x80 >> (i % 8);
        if value {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] ^= 0x80 >> (i % 8);
    }

    pub fn count_ones(&self) -> u32 {
        self.bytes.iter().map(|b| b.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// The first `len` bits.
    pub fn prefix(&self, len: usize) -> Bits {
        assert!(len <= self.len);
        Bits::from_prefix(&self.bytes, len)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    /// Parses a string of `0` and `1` characters; `_` and spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bools = s
            .chars()
            .filter(|c| *c != '_' && *c != ' ')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(param(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Bits::from_bools(&bools))
    }
}
