//! Single-pass compressor and decompressor.
//!
//! A container is a [`StreamHeader`] followed by tokens:
//!
//! ```text
//! reference     id (1-3 bytes, see `id`)  deviation
//! new basis     FF 01  basis bytes        deviation
//! reset         FF 00
//! end           FF 02
//! ```
//!
//! The deviation is the syndrome, little-endian in `ceil(m / 8)` bytes.
//! Bases that miss every dictionary are written inline. In RAM and hybrid
//! modes each inline basis also takes the next dynamic ID, so the decoder
//! rebuilds the ID -> basis table from order of appearance alone.

mod header;
pub mod id;
mod report;

use std::io::Write;

pub use header::{Mode, StreamHeader, HEADER_LEN, MAGIC};
pub use id::{IdSpace, HYBRID_RAM_ID_LIMIT, PRIMARY_ID_LIMIT};
pub use report::{compressed_size_report, compression_gain, SizeReport, TokenCounts};

use crate::bits::Bits;
use crate::dynamic::DynamicDictionary;
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintAlgo};
use crate::hamming::CodeParams;
use crate::preset::PresetDictionary;
use crate::record::{delta_decode_timestamps, delta_encode_timestamps, CanRecord, ChunkingConfig};
use crate::transform::{from_basis_deviation, to_basis_deviation, BasisDeviation};

const CONTROL: u8 = 0xFF;
const CTRL_RESET: u8 = 0x00;
const CTRL_NEW_BASIS: u8 = 0x01;
const CTRL_END: u8 = 0x02;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    RefPrimary { id: u64, deviation: u16 },
    RefRam { id: u64, deviation: u16 },
    NewBasis { basis: Bits, deviation: u16 },
    Reset,
    EndOfStream,
}

/// Everything the codec needs besides the dictionaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecConfig {
    pub mode: Mode,
    pub chunking: ChunkingConfig,
    pub algo: FingerprintAlgo,
    pub delta_timestamps: bool,
}

fn write_deviation(deviation: u16, code: &CodeParams, out: &mut Vec<u8>) {
    out.extend_from_slice(&deviation.to_le_bytes()[..code.deviation_bytes()]);
}

/// Online encoder: each pushed chunk is written out before the next arrives.
pub struct Encoder<'a, W: Write> {
    out: W,
    mode: Mode,
    code: CodeParams,
    algo: FingerprintAlgo,
    preset: Option<&'a PresetDictionary>,
    dynamic: Option<&'a mut DynamicDictionary>,
    buf: Vec<u8>,
    counts: TokenCounts,
    written: u64,
}

impl<'a, W: Write> Encoder<'a, W> {
    /// Checks the dictionaries against the mode and writes the header.
    pub fn new(
        mut out: W,
        config: &CodecConfig,
        record_count: u64,
        preset: Option<&'a PresetDictionary>,
        dynamic: Option<&'a mut DynamicDictionary>,
    ) -> Result<Self> {
        let mode = config.mode;
        match (mode.uses_preset(), preset) {
            (true, None) => {
                return Err(Error::Config(format!("{mode} mode needs a preset dictionary")))
            }
            (false, Some(_)) => {
                return Err(Error::Config(format!("{mode} mode takes no preset dictionary")))
            }
            (_, Some(p)) => {
                if *p.code() != config.chunking.code || p.algo() != config.algo {
                    return Err(Error::DictMismatch(format!(
                        "dictionary trained for {} / {}, stream uses {} / {}",
                        p.code(),
                        p.algo(),
                        config.chunking.code,
                        config.algo
                    )));
                }
            }
            (false, None) => {}
        }
        match (mode.uses_dynamic(), dynamic.is_some()) {
            (true, false) => {
                return Err(Error::Config(format!("{mode} mode needs a dynamic dictionary")))
            }
            (false, true) => {
                return Err(Error::Config(format!("{mode} mode takes no dynamic dictionary")))
            }
            _ => {}
        }
        let header = StreamHeader {
            mode,
            chunking: config.chunking.clone(),
            algo: config.algo,
            dict_id: preset.map_or(0, PresetDictionary::dict_id),
            record_count,
            delta_timestamps: config.delta_timestamps,
        };
        let bytes = header.to_bytes()?;
        out.write_all(&bytes)?;
        Ok(Encoder {
            out,
            mode,
            code: config.chunking.code.clone(),
            algo: config.algo,
            preset,
            dynamic,
            buf: Vec::with_capacity(64),
            counts: TokenCounts::default(),
            written: HEADER_LEN as u64,
        })
    }

    pub fn push(&mut self, chunk: &Bits) -> Result<()> {
        let BasisDeviation { basis, deviation } = to_basis_deviation(chunk, &self.code)?;
        let fp = Fingerprint::of(basis.as_bytes(), self.algo);
        self.buf.clear();

        if let Some(id) = self.preset.and_then(|p| p.lookup(&fp)) {
            id::encode_id(id, IdSpace::Primary, &mut self.buf)?;
            write_deviation(deviation, &self.code, &mut self.buf);
            self.counts.ref_primary += 1;
            return self.flush_token();
        }

        let space = if self.mode == Mode::Hybrid {
            IdSpace::HybridRam
        } else {
            IdSpace::Primary
        };
        if let Some(dynamic) = self.dynamic.as_deref_mut() {
            if let Some(id) = dynamic.lookup_touch_verified(&fp, &basis) {
                id::encode_id(id, space, &mut self.buf)?;
                write_deviation(deviation, &self.code, &mut self.buf);
                if space == IdSpace::Primary {
                    self.counts.ref_primary += 1;
                } else {
                    self.counts.ref_ram += 1;
                }
                return self.flush_token();
            }
            if dynamic.next_id() >= space.limit() {
                dynamic.clear();
                self.buf.extend_from_slice(&[CONTROL, CTRL_RESET]);
                self.counts.reset += 1;
            }
            dynamic.insert_verified(fp, &basis);
        }

        self.buf.extend_from_slice(&[CONTROL, CTRL_NEW_BASIS]);
        self.buf.extend_from_slice(basis.as_bytes());
        write_deviation(deviation, &self.code, &mut self.buf);
        self.counts.new_basis += 1;
        self.flush_token()
    }

    fn flush_token(&mut self) -> Result<()> {
        self.out.write_all(&self.buf)?;
        self.written += self.buf.len() as u64;
        Ok(())
    }

    /// Bytes emitted so far, header included.
    pub fn bytes_written(&self) -> u64 {
        self.written
    }

    pub fn counts(&self) -> &TokenCounts {
        &self.counts
    }

    /// Writes the end marker and hands back the sink.
    pub fn finish(mut self) -> Result<W> {
        self.out.write_all(&[CONTROL, CTRL_END])?;
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Compresses a chunk stream into a container.
pub fn compress<'c, I>(
    chunks: I,
    config: &CodecConfig,
    record_count: u64,
    preset: Option<&PresetDictionary>,
    dynamic: Option<&mut DynamicDictionary>,
) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = &'c Bits>,
{
    let mut enc = Encoder::new(Vec::new(), config, record_count, preset, dynamic)?;
    for chunk in chunks {
        enc.push(chunk)?;
    }
    enc.finish()
}

/// Iterates the tokens of a container body (everything after the header).
pub struct TokenReader<'b> {
    bytes: &'b [u8],
    pos: usize,
    base: usize,
    code: CodeParams,
    mode: Mode,
    done: bool,
}

impl<'b> TokenReader<'b> {
    pub fn new(body: &'b [u8], header: &StreamHeader) -> Self {
        TokenReader {
            bytes: body,
            pos: 0,
            base: HEADER_LEN,
            code: header.chunking.code.clone(),
            mode: header.mode,
            done: false,
        }
    }

    /// Offset into the container of the next unread byte.
    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'b [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated(format!("{what} at offset {}", self.offset())));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn deviation(&mut self) -> Result<u16> {
        let n = self.code.deviation_bytes();
        let raw = self.take(n, "deviation")?;
        let mut buf = [0u8; 2];
        buf[..n].copy_from_slice(raw);
        let dev = u16::from_le_bytes(buf);
        if dev as u32 >= 1 << self.code.parity_bits() {
            return Err(Error::Corrupt(format!("deviation {dev:#x} wider than m bits")));
        }
        Ok(dev)
    }

    fn read_token(&mut self) -> Result<Token> {
        let start = self.offset();
        let first = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::Truncated("missing end-of-stream marker".into()))?;
        match id::space_of(first) {
            None => {
                let ctrl = self.take(2, "control token")?[1];
                match ctrl {
                    CTRL_RESET => Ok(Token::Reset),
                    CTRL_END => Ok(Token::EndOfStream),
                    CTRL_NEW_BASIS => {
                        let raw = self.take(self.code.basis_bytes(), "inline basis")?;
                        let basis = Bits::from_bytes(raw.to_vec(), self.code.basis_bits())
                            .map_err(|_| Error::Corrupt(format!("basis padding at offset {start}")))?;
                        let deviation = self.deviation()?;
                        Ok(Token::NewBasis { basis, deviation })
                    }
                    other => Err(Error::UnknownToken(other, start + 1)),
                }
            }
            Some(space) => {
                if space == IdSpace::HybridRam && self.mode != Mode::Hybrid {
                    return Err(Error::UnknownToken(first, start));
                }
                let (id, len) = id::decode_id(&self.bytes[self.pos..], space).map_err(|e| match e {
                    Error::Truncated(_) => Error::Truncated(format!("id at offset {start}")),
                    other => other,
                })?;
                self.pos += len;
                let deviation = self.deviation()?;
                Ok(match space {
                    IdSpace::Primary => Token::RefPrimary { id, deviation },
                    IdSpace::HybridRam => Token::RefRam { id, deviation },
                })
            }
        }
    }
}

impl Iterator for TokenReader<'_> {
    type Item = Result<Token>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let token = self.read_token();
        match &token {
            Ok(Token::EndOfStream) => {
                self.done = true;
                if self.pos != self.bytes.len() {
                    return Some(Err(Error::Corrupt(format!(
                        "{} bytes after end-of-stream",
                        self.bytes.len() - self.pos
                    ))));
                }
            }
            Err(_) => self.done = true,
            Ok(_) => {}
        }
        Some(token)
    }
}

/// Decodes a container back to its chunk stream.
///
/// Flash and hybrid containers need the decompressor-side preset dictionary
/// whose ID matches the header.
pub fn decompress(
    container: &[u8],
    preset: Option<&PresetDictionary>,
) -> Result<(StreamHeader, Vec<Bits>)> {
    let header = StreamHeader::parse(container)?;
    let code = header.chunking.code.clone();
    let preset = if header.mode.uses_preset() {
        let p = preset.ok_or_else(|| {
            Error::Config(format!("{} container needs its preset dictionary", header.mode))
        })?;
        if p.dict_id() != header.dict_id {
            return Err(Error::DictMismatch(format!(
                "container expects dictionary {:016x}, got {:016x}",
                header.dict_id,
                p.dict_id()
            )));
        }
        if !p.has_bases() {
            return Err(Error::Config(
                "decompression needs the decompressor-side dictionary (.gdpb)".into(),
            ));
        }
        Some(p)
    } else {
        None
    };

    let expected = header
        .chunking
        .chunking
        .chunk_count(usize::try_from(header.record_count).map_err(|_| {
            Error::Corrupt("record count does not fit in memory".into())
        })?);
    let mut chunks = Vec::with_capacity(expected.min(1 << 24));
    let mut local: Vec<Bits> = Vec::new();
    let mut ended = false;

    for token in TokenReader::new(&container[HEADER_LEN..], &header) {
        let (basis, deviation) = match token? {
            Token::EndOfStream => {
                ended = true;
                continue;
            }
            Token::Reset => {
                local.clear();
                continue;
            }
            Token::NewBasis { basis, deviation } => {
                if header.mode.uses_dynamic() {
                    local.push(basis.clone());
                }
                (basis, deviation)
            }
            Token::RefPrimary { id, deviation } => {
                let basis = match preset {
                    Some(p) => p.basis(id).ok_or(Error::OutOfRange {
                        id,
                        limit: p.len() as u64,
                    })?,
                    None => local.get(id as usize).ok_or(Error::OutOfRange {
                        id,
                        limit: local.len() as u64,
                    })?,
                };
                (basis.clone(), deviation)
            }
            Token::RefRam { id, deviation } => {
                let basis = local.get(id as usize).ok_or(Error::OutOfRange {
                    id,
                    limit: local.len() as u64,
                })?;
                (basis.clone(), deviation)
            }
        };
        chunks.push(from_basis_deviation(&BasisDeviation { basis, deviation }, &code)?);
    }
    if !ended {
        return Err(Error::Truncated("missing end-of-stream marker".into()));
    }
    if chunks.len() != expected {
        return Err(Error::Corrupt(format!(
            "{} chunks decoded, header implies {expected}",
            chunks.len()
        )));
    }
    Ok((header, chunks))
}

/// Delta-codes (if configured), chunks and compresses a record stream.
pub fn compress_records(
    records: &[CanRecord],
    config: &CodecConfig,
    preset: Option<&PresetDictionary>,
    dynamic: Option<&mut DynamicDictionary>,
) -> Result<Vec<u8>> {
    for rec in records {
        rec.validate()?;
    }
    let chunks = records_to_chunks(records, config.delta_timestamps, &config.chunking);
    compress(&chunks, config, records.len() as u64, preset, dynamic)
}

/// The chunk stream the codec sees for `records`.
pub fn records_to_chunks(
    records: &[CanRecord],
    delta_timestamps: bool,
    chunking: &ChunkingConfig,
) -> Vec<Bits> {
    if delta_timestamps {
        let mut coded = records.to_vec();
        delta_encode_timestamps(&mut coded);
        chunking.records_to_chunks(&coded)
    } else {
        chunking.records_to_chunks(records)
    }
}

/// Inverse of [`compress_records`].
pub fn decompress_records(
    container: &[u8],
    preset: Option<&PresetDictionary>,
) -> Result<(StreamHeader, Vec<CanRecord>)> {
    let (header, chunks) = decompress(container, preset)?;
    let mut records = header
        .chunking
        .chunks_to_records(&chunks, header.record_count as usize)?;
    if header.delta_timestamps {
        delta_decode_timestamps(&mut records);
    }
    for rec in &records {
        rec.validate()
            .map_err(|e| Error::Corrupt(format!("decoded record invalid: {e}")))?;
    }
    Ok((header, records))
}
