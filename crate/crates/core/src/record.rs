//! Logger records, differential timestamps, and record <-> chunk conversion.
//!
//! A record is 27 bytes, little-endian, in this order:
//!
//! | offset | size | field         |
//! |-------:|-----:|---------------|
//! | 0      | 8    | timestamp (ns)|
//! | 8      | 4    | identifier    |
//! | 12     | 1    | ide           |
//! | 13     | 1    | dlc           |
//! | 14     | 1    | edl           |
//! | 15     | 1    | brs           |
//! | 16     | 1    | dir           |
//! | 17     | 1    | channel       |
//! | 18     | 1    | data_length   |
//! | 19     | 8    | data          |

use std::fmt;
use std::io::{self, Read, Write};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hamming::CodeParams;

pub const RECORD_LEN: usize = 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CanRecord {
    pub timestamp: u64,
    pub identifier: u32,
    pub ide: u8,
    pub dlc: u8,
    pub edl: u8,
    pub brs: u8,
    pub dir: u8,
    pub channel: u8,
    pub data_length: u8,
    pub data: [u8; 8],
}

impl CanRecord {
    pub fn validate(&self) -> Result<()> {
        let limit = if self.ide == 0 { 1u32 << 11 } else { 1u32 << 29 };
        if self.identifier >= limit {
            return Err(Error::Format(format!(
                "identifier {:#x} out of range for ide={}",
                self.identifier, self.ide
            )));
        }
        if self.data_length > 8 {
            return Err(Error::Format(format!("data length {} exceeds 8", self.data_length)));
        }
        if self.data[self.data_length as usize..].iter().any(|&b| b != 0) {
            return Err(Error::Format("nonzero bytes past data length".into()));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> [u8; RECORD_LEN] {
        let mut out = [0u8; RECORD_LEN];
        out[0..8].copy_from_slice(&self.timestamp.to_le_bytes());
        out[8..12].copy_from_slice(&self.identifier.to_le_bytes());
        out[12] = self.ide;
        out[13] = self.dlc;
        out[14] = self.edl;
        out[15] = self.brs;
        out[16] = self.dir;
        out[17] = self.channel;
        out[18] = self.data_length;
        out[19..27].copy_from_slice(&self.data);
        out
    }

    /// Serializes after checking the record invariants.
    pub fn serialize(&self) -> Result<[u8; RECORD_LEN]> {
        self.validate()?;
        Ok(self.to_bytes())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let bytes: &[u8; RECORD_LEN] = bytes.try_into().map_err(|_| {
            Error::Format(format!("record must be {RECORD_LEN} bytes, got {}", bytes.len()))
        })?;
        let rec = Self::from_raw(bytes);
        rec.validate()?;
        Ok(rec)
    }

    // Field split without validation; delta-coded records carry arbitrary
    // timestamps but the other fields are untouched.
    fn from_raw(bytes: &[u8; RECORD_LEN]) -> Self {
        CanRecord {
            timestamp: u64::from_le_bytes(bytes[0..8].try_into().unwrap()),
            identifier: u32::from_le_bytes(bytes[8..12].try_into().unwrap()),
            ide: bytes[12],
            dlc: bytes[13],
            edl: bytes[14],
            brs: bytes[15],
            dir: bytes[16],
            channel: bytes[17],
            data_length: bytes[18],
            data: bytes[19..27].try_into().unwrap(),
        }
    }
}

/// Replaces every timestamp after the first by its difference to the
/// previous one (wrapping, so out-of-order logs survive).
pub fn delta_encode_timestamps(records: &mut [CanRecord]) {
    let mut prev = None;
    for rec in records {
        let t = rec.timestamp;
        if let Some(p) = prev {
            rec.timestamp = t.wrapping_sub(p);
        }
        prev = Some(t);
    }
}

pub fn delta_decode_timestamps(records: &mut [CanRecord]) {
    let mut prev: Option<u64> = None;
    for rec in records {
        if let Some(p) = prev {
            rec.timestamp = rec.timestamp.wrapping_add(p);
        }
        prev = Some(rec.timestamp);
    }
}

/// How records are grouped into chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chunking {
    /// Each record padded to 28 bytes and split into two 112-bit chunks.
    HalfRow,
    /// One record per 216-bit chunk.
    FullRow,
    /// `r` consecutive records per chunk.
    MultiRow(u8),
}

impl Chunking {
    pub fn chunk_bytes(self) -> usize {
        match self {
            Chunking::HalfRow => RECORD_LEN.div_ceil(2),
            Chunking::FullRow => RECORD_LEN,
            Chunking::MultiRow(r) => RECORD_LEN * r as usize,
        }
    }

    pub fn chunk_count(self, records: usize) -> usize {
        match self {
            Chunking::HalfRow => 2 * records,
            Chunking::FullRow => records,
            Chunking::MultiRow(r) => records.div_ceil(r as usize),
        }
    }

    /// Header encoding: `(kind, r)`.
    pub fn to_code(self) -> (u8, u8) {
        match self {
            Chunking::HalfRow => (1, 0),
            Chunking::FullRow => (2, 0),
            Chunking::MultiRow(r) => (3, r),
        }
    }

    pub fn from_code(kind: u8, r: u8) -> Result<Self> {
        match (kind, r) {
            (1, 0) => Ok(Chunking::HalfRow),
            (2, 0) => Ok(Chunking::FullRow),
            (3, r) if r >= 1 => Ok(Chunking::MultiRow(r)),
            _ => Err(Error::Format(format!("unknown chunking {kind}/{r}"))),
        }
    }
}

impl fmt::Display for Chunking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chunking::HalfRow => f.write_str("half"),
            Chunking::FullRow => f.write_str("full"),
            Chunking::MultiRow(r) => write!(f, "multi:{r}"),
        }
    }
}

impl std::str::FromStr for Chunking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(Chunking::HalfRow),
            "full" => Ok(Chunking::FullRow),
            _ => {
                let r = s
                    .strip_prefix("multi:")
                    .and_then(|r| r.parse::<u8>().ok())
                    .filter(|&r| r >= 1)
                    .ok_or_else(|| Error::Config(format!("unknown chunking {s:?}")))?;
                Ok(Chunking::MultiRow(r))
            }
        }
    }
}

/// A chunking mode together with the code sized for its chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkingConfig {
    pub chunking: Chunking,
    pub code: CodeParams,
}

impl ChunkingConfig {
    pub fn new(chunking: Chunking) -> Result<Self> {
        if chunking == Chunking::MultiRow(0) {
            return Err(Error::Config("multi-row factor must be at least 1".into()));
        }
        let code = CodeParams::for_chunk_bits(chunking.chunk_bytes() * 8)?;
        // the container and dictionary headers store l in one byte
        if code.shortening() > u8::MAX as usize {
            return Err(Error::Config(format!(
                "{chunking} needs {code}, whose shortening {} does not fit the header",
                code.shortening()
            )));
        }
        Ok(ChunkingConfig { chunking, code })
    }

    pub fn records_to_chunks(&self, records: &[CanRecord]) -> Vec<Bits> {
        let bits = self.code.chunk_bits();
        match self.chunking {
            Chunking::HalfRow => {
                let half = self.chunking.chunk_bytes();
                let mut out = Vec::with_capacity(2 * records.len());
                for rec in records {
                    let mut padded = [0u8; RECORD_LEN + 1];
                    padded[..RECORD_LEN].copy_from_slice(&rec.to_bytes());
                    out.push(Bits::from_prefix(&padded[..half], bits));
                    out.push(Bits::from_prefix(&padded[half..], bits));
                }
                out
            }
            Chunking::FullRow => records
                .iter()
                .map(|rec| Bits::from_prefix(&rec.to_bytes(), bits))
                .collect(),
            Chunking::MultiRow(r) => records
                .chunks(r as usize)
                .map(|group| {
                    let mut buf = vec![0u8; self.chunking.chunk_bytes()];
                    for (i, rec) in group.iter().enumerate() {
                        buf[i * RECORD_LEN..(i + 1) * RECORD_LEN].copy_from_slice(&rec.to_bytes());
                    }
                    Bits::from_prefix(&buf, bits)
                })
                .collect(),
        }
    }

    /// Inverse of [`records_to_chunks`](Self::records_to_chunks). Padding must
    /// be zero. Records are split without validation so that delta-coded
    /// streams pass through; validate after decoding timestamps.
    pub fn chunks_to_records(&self, chunks: &[Bits], record_count: usize) -> Result<Vec<CanRecord>> {
        let expected = self.chunking.chunk_count(record_count);
        if chunks.len() != expected {
            return Err(Error::Corrupt(format!(
                "{} chunks for {record_count} records, expected {expected}",
                chunks.len()
            )));
        }
        if let Some(bad) = chunks.iter().find(|c| c.len() != self.code.chunk_bits()) {
            return Err(Error::Parameter(format!(
                "chunk of {} bits, expected {}",
                bad.len(),
                self.code.chunk_bits()
            )));
        }
        let mut out = Vec::with_capacity(record_count);
        match self.chunking {
            Chunking::HalfRow => {
                for pair in chunks.chunks_exact(2) {
                    let mut buf = [0u8; RECORD_LEN + 1];
                    buf[..14].copy_from_slice(pair[0].as_bytes());
                    buf[14..].copy_from_slice(pair[1].as_bytes());
                    if buf[RECORD_LEN] != 0 {
                        return Err(Error::Corrupt("nonzero half-row pad byte".into()));
                    }
                    out.push(CanRecord::from_raw(buf[..RECORD_LEN].try_into().unwrap()));
                }
            }
            Chunking::FullRow => {
                for chunk in chunks {
                    out.push(CanRecord::from_raw(chunk.as_bytes().try_into().unwrap()));
                }
            }
            Chunking::MultiRow(_) => {
                let mut left = record_count;
                for chunk in chunks {
                    let bytes = chunk.as_bytes();
                    let take = left.min(bytes.len() / RECORD_LEN);
                    for rec in bytes[..take * RECORD_LEN].chunks_exact(RECORD_LEN) {
                        out.push(CanRecord::from_raw(rec.try_into().unwrap()));
                    }
                    if bytes[take * RECORD_LEN..].iter().any(|&b| b != 0) {
                        return Err(Error::Corrupt("nonzero multi-row padding".into()));
                    }
                    left -= take;
                }
            }
        }
        Ok(out)
    }
}

/// Reads a raw `.gdr` log: concatenated 27-byte records, no framing.
pub fn read_raw_log<R: Read>(mut reader: R) -> Result<Vec<CanRecord>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    parse_raw_log(&bytes)
}

pub fn parse_raw_log(bytes: &[u8]) -> Result<Vec<CanRecord>> {
    if !bytes.len().is_multiple_of(RECORD_LEN) {
        return Err(Error::Format(format!(
            "raw log length {} is not a multiple of {RECORD_LEN}",
            bytes.len()
        )));
    }
    bytes.chunks_exact(RECORD_LEN).map(CanRecord::parse).collect()
}

pub fn write_raw_log<W: Write>(mut writer: W, records: &[CanRecord]) -> io::Result<()> {
    for rec in records {
        writer.write_all(&rec.to_bytes())?;
    }
    writer.flush()
}
