//! Basis fingerprints.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FingerprintAlgo {
    /// IEEE CRC-32 (reflected 0xEDB88320, init and final XOR 0xFFFFFFFF).
    #[default]
    Crc32,
    /// 64-bit FNV-1a.
    Fnv64,
}

impl FingerprintAlgo {
    /// Digest length in bytes.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            FingerprintAlgo::Crc32 => 4,
            FingerprintAlgo::Fnv64 => 8,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            FingerprintAlgo::Crc32 => 1,
            FingerprintAlgo::Fnv64 => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(FingerprintAlgo::Crc32),
            2 => Ok(FingerprintAlgo::Fnv64),
            other => Err(Error::Format(format!("unknown fingerprint algorithm {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FingerprintAlgo::Crc32 => "crc32",
            FingerprintAlgo::Fnv64 => "fnv64",
        }
    }
}

impl fmt::Display for FingerprintAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FingerprintAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "crc32" => Ok(FingerprintAlgo::Crc32),
            "fnv64" => Ok(FingerprintAlgo::Fnv64),
            other => Err(Error::Config(format!("unknown fingerprint algorithm {other:?}"))),
        }
    }
}

/// A basis fingerprint. Stored widened to 64 bits; `algo` fixes the width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    algo: FingerprintAlgo,
    value: u64,
}

impl Fingerprint {
    pub fn of(bytes: &[u8], algo: FingerprintAlgo) -> Self {
        let value = match algo {
            FingerprintAlgo::Crc32 => crc32fast::hash(bytes) as u64,
            FingerprintAlgo::Fnv64 => fnv64(bytes),
        };
        Fingerprint { algo, value }
    }

    pub fn algo(&self) -> FingerprintAlgo {
        self.algo
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Little-endian digest bytes, 4 or 8 long.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.value.to_le_bytes()[..self.algo.len()].to_vec()
    }

    pub fn from_bytes(bytes: &[u8], algo: FingerprintAlgo) -> Result<Self> {
        if bytes.len() != algo.len() {
            return Err(Error::Format(format!(
                "{} fingerprint needs {} bytes, got {}",
                algo,
                algo.len(),
                bytes.len()
            )));
        }
        let mut buf = [0u8; 8];
        buf[..bytes.len()].copy_from_slice(bytes);
        Ok(Fingerprint {
            algo,
            value: u64::from_le_bytes(buf),
        })
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$x}", self.value, width = self.algo.len() * 2)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}
