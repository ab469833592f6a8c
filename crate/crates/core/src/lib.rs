//! Lossless, single-pass compression of CAN-bus log records under explicit
//! RAM and flash budgets.
//!
//! Each record stream is cut into fixed-size chunks. A shortened Hamming
//! code splits every chunk into a *basis* (the message bits of the nearest
//! codeword) and a small *deviation* (the syndrome). Similar chunks share a
//! basis, so bases are deduplicated by fingerprint:
//!
//! * [`Mode::RamOnly`]: a [`DynamicDictionary`] learned on the fly, sized by
//!   a RAM budget, evicting the least recently matched fingerprint;
//! * [`Mode::FlashOnly`]: a trained, read-only [`PresetDictionary`] sized by
//!   a flash budget;
//! * [`Mode::Hybrid`]: the preset dictionary first, then the dynamic one.
//!
//! ```
//! use gdcan::{compress_records, decompress_records, CanRecord, Chunking, ChunkingConfig,
//!             CodecConfig, DynamicDictionary, FingerprintAlgo, Mode};
//!
//! let records: Vec<CanRecord> = (0..100)
//!     .map(|i| CanRecord { timestamp: 1_000 * i, identifier: 0x123, data_length: 2,
//!                          data: [0xAB, (i % 3) as u8, 0, 0, 0, 0, 0, 0], ..Default::default() })
//!     .collect();
//! let config = CodecConfig {
//!     mode: Mode::RamOnly,
//!     chunking: ChunkingConfig::new(Chunking::HalfRow)?,
//!     algo: FingerprintAlgo::Crc32,
//!     delta_timestamps: true,
//! };
//! let mut dict = DynamicDictionary::new(64);
//! let container = compress_records(&records, &config, None, Some(&mut dict))?;
//! assert!(container.len() < records.len() * 27);
//! let (_, back) = decompress_records(&container, None)?;
//! assert_eq!(back, records);
//! # Ok::<(), gdcan::Error>(())
//! ```
//!
//! The `book/` directory next to this crate walks through the coding
//! scheme, dictionaries and container format in more depth.

pub mod bits;
pub mod codec;
pub mod dynamic;
mod error;
pub mod fingerprint;
pub mod hamming;
pub mod mdf4;
pub mod preset;
pub mod record;
pub mod transform;

pub use bits::Bits;
pub use codec::{
    compress, compress_records, compressed_size_report, compression_gain, decompress,
    decompress_records, CodecConfig, Encoder, Mode, SizeReport, StreamHeader, Token,
};
pub use dynamic::{capacity_for, Accounting, DynamicDictionary};
pub use error::{Error, Result};
pub use fingerprint::{Fingerprint, FingerprintAlgo};
pub use hamming::{CodeParams, SyndromeClass};
pub use preset::PresetDictionary;
pub use record::{CanRecord, Chunking, ChunkingConfig, RECORD_LEN};
pub use transform::{from_basis_deviation, to_basis_deviation, BasisDeviation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hamming.md")]
    mod hamming {}
    #[doc = include_str!("../../../book/src/transform.md")]
    mod transform {}
    #[doc = include_str!("../../../book/src/dictionaries.md")]
    mod dictionaries {}
    #[doc = include_str!("../../../book/src/container.md")]
    mod container {}
    #[doc = include_str!("../../../book/src/records.md")]
    mod records {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
