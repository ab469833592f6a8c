use std::fmt;

use crate::error::{Error, Result};
use crate::fingerprint::FingerprintAlgo;
use crate::record::{Chunking, ChunkingConfig};

pub const MAGIC: &[u8; 4] = b"GDCB";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 28;

const FLAG_DELTA_TS: u8 = 0x01;

/// Which dictionaries the codec consults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Dynamic dictionary in RAM only.
    RamOnly = 1,
    /// Preset dictionary in flash only.
    FlashOnly = 2,
    /// Preset dictionary first, then the dynamic one.
    Hybrid = 3,
}

impl Mode {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(Mode::RamOnly),
            2 => Ok(Mode::FlashOnly),
            3 => Ok(Mode::Hybrid),
            other => Err(Error::Format(format!("unknown mode {other}"))),
        }
    }

    pub fn uses_preset(self) -> bool {
        self != Mode::RamOnly
    }

    pub fn uses_dynamic(self) -> bool {
        self != Mode::FlashOnly
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::RamOnly => "ram",
            Mode::FlashOnly => "flash",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ram" | "ram_only" => Ok(Mode::RamOnly),
            "flash" | "flash_only" => Ok(Mode::FlashOnly),
            "hybrid" => Ok(Mode::Hybrid),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Fixed 28-byte container header.
///
/// ```text
/// 0   magic "GDCB"
/// 4   version
/// 5   mode
/// 6   chunking kind (1 half, 2 full, 3 multi), 7 rows per chunk (multi only)
/// 8   m, 9 l
/// 10  fingerprint algo
/// 11  dict_id        u64 LE (zero without a preset dictionary)
/// 19  record_count   u64 LE
/// 27  flags          bit 0: differential timestamps
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamHeader {
    pub mode: Mode,
    pub chunking: ChunkingConfig,
    pub algo: FingerprintAlgo,
    pub dict_id: u64,
    pub record_count: u64,
    pub delta_timestamps: bool,
}

impl StreamHeader {
    pub fn to_bytes(&self) -> Result<[u8; HEADER_LEN]> {
        let code = &self.chunking.code;
        let shortening = u8::try_from(code.shortening()).map_err(|_| {
            Error::Config(format!(
                "{} needs code {code}, whose shortening does not fit the header",
                self.chunking.chunking
            ))
        })?;
        let (kind, rows) = self.chunking.chunking.to_code();
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(MAGIC);
        out[4] = VERSION;
        out[5] = self.mode as u8;
        out[6] = kind;
        out[7] = rows;
        out[8] = code.parity_bits();
        out[9] = shortening;
        out[10] = self.algo.code();
        out[11..19].copy_from_slice(&self.dict_id.to_le_bytes());
        out[19..27].copy_from_slice(&self.record_count.to_le_bytes());
        out[27] = if self.delta_timestamps { FLAG_DELTA_TS } else { 0 };
        Ok(out)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated("container header".into()));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format("not a GDCB container".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Format(format!("unsupported container version {}", bytes[4])));
        }
        let mode = Mode::from_code(bytes[5])?;
        let chunking = ChunkingConfig::new(Chunking::from_code(bytes[6], bytes[7])?)?;
        if chunking.code.parity_bits() != bytes[8] || chunking.code.shortening() != bytes[9] as usize
        {
            return Err(Error::Format(format!(
                "code ({}, {}) does not match {} chunking",
                bytes[8], bytes[9], chunking.chunking
            )));
        }
        let algo = FingerprintAlgo::from_code(bytes[10])?;
        let dict_id = u64::from_le_bytes(bytes[11..19].try_into().unwrap());
        let record_count = u64::from_le_bytes(bytes[19..27].try_into().unwrap());
        if (dict_id != 0) != mode.uses_preset() {
            return Err(Error::Format(format!(
                "dictionary id {dict_id:#x} inconsistent with {mode} mode"
            )));
        }
        let flags = bytes[27];
        if flags & !FLAG_DELTA_TS != 0 {
            return Err(Error::Format(format!("unknown header flags {flags:#04x}")));
        }
        Ok(StreamHeader {
            mode,
            chunking,
            algo,
            dict_id,
            record_count,
            delta_timestamps: flags & FLAG_DELTA_TS != 0,
        })
    }
}
