//! Flash-resident preset dictionary: training, serialization and lookup.
//!
//! Training counts basis fingerprints per file, ranks each file by count,
//! then merges the files round-robin (every file's rank 0, then every rank 1,
//! ...) skipping fingerprints already taken. Rank in the merged list is the
//! ID. The compressor side stores fingerprints only; the decompressor side
//! also stores the bases.
//!
//! File layout (little-endian):
//!
//! ```text
//! magic "GDPD" | "GDPB"   4 bytes
//! version                 1 byte (1)
//! fingerprint algo        1 byte (1 = crc32, 2 = fnv64)
//! m, l                    1 byte each
//! entry count             4 bytes
//! entries                 GDPD: fingerprint
//!                         GDPB: fingerprint, basis (packed MSB-first, zero padded)
//! ```

use std::collections::HashMap;

use crate::bits::Bits;
use crate::codec::id::PRIMARY_ID_LIMIT;
use crate::error::{Error, Result};
use crate::fingerprint::{fnv64, Fingerprint, FingerprintAlgo};
use crate::hamming::CodeParams;
use crate::transform::to_basis_deviation;

pub const COMPRESSOR_MAGIC: &[u8; 4] = b"GDPD";
pub const DECOMPRESSOR_MAGIC: &[u8; 4] = b"GDPB";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 12;

/// One distinct basis seen during training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedEntry {
    pub fingerprint: Fingerprint,
    pub basis: Bits,
    pub count: u64,
}

/// Ranks the bases of one file by how often they occur. Ties keep
/// first-occurrence order.
pub fn count_frequencies<'a, I>(
    chunks: I,
    code: &CodeParams,
    algo: FingerprintAlgo,
) -> Result<Vec<RankedEntry>>
where
    I: IntoIterator<Item = &'a Bits>,
{
    let mut entries: Vec<RankedEntry> = Vec::new();
    let mut seen: HashMap<Fingerprint, usize> = HashMap::new();
    for chunk in chunks {
        let pair = to_basis_deviation(chunk, code)?;
        let fp = Fingerprint::of(pair.basis.as_bytes(), algo);
        match seen.get(&fp) {
            Some(&i) => entries[i].count += 1,
            None => {
                seen.insert(fp, entries.len());
                entries.push(RankedEntry {
                    fingerprint: fp,
                    basis: pair.basis,
                    count: 1,
                });
            }
        }
    }
    // stable, so equal counts stay in first-seen order
    entries.sort_by_key(|e| std::cmp::Reverse(e.count));
    Ok(entries)
}

/// Interleaves per-file rankings by rank, skipping repeats.
pub fn merge_round_robin(per_file: &[Vec<RankedEntry>]) -> Vec<RankedEntry> {
    let rounds = per_file.iter().map(Vec::len).max().unwrap_or(0);
    let mut taken = std::collections::HashSet::new();
    let mut merged = Vec::new();
    for rank in 0..rounds {
        for list in per_file {
            if let Some(entry) = list.get(rank) {
                if taken.insert(entry.fingerprint) {
                    merged.push(entry.clone());
                }
            }
        }
    }
    merged
}

/// Keeps as many leading entries as fit in `flash_budget` bytes of
/// fingerprints. IDs are implicit by rank and take no space.
pub fn truncate_to_flash(
    merged: &[RankedEntry],
    flash_budget: usize,
    code: &CodeParams,
    algo: FingerprintAlgo,
) -> Result<PresetDictionary> {
    let keep = (flash_budget / algo.len())
        .min(merged.len())
        .min(PRIMARY_ID_LIMIT as usize);
    let fingerprints = merged[..keep].iter().map(|e| e.fingerprint).collect();
    let bases = merged[..keep].iter().map(|e| e.basis.clone()).collect();
    PresetDictionary::new(code.clone(), algo, fingerprints, Some(bases))
}

/// Convenience: rank, merge and truncate in one step.
pub fn train<'a, F, I>(
    files: F,
    flash_budget: usize,
    code: &CodeParams,
    algo: FingerprintAlgo,
) -> Result<PresetDictionary>
where
    F: IntoIterator<Item = I>,
    I: IntoIterator<Item = &'a Bits>,
{
    let ranked = files
        .into_iter()
        .map(|chunks| count_frequencies(chunks, code, algo))
        .collect::<Result<Vec<_>>>()?;
    truncate_to_flash(&merge_round_robin(&ranked), flash_budget, code, algo)
}

/// A trained, read-only dictionary.
///
/// Built from a `GDPD` file it can only compress; built from a `GDPB` file
/// (or from training) it also resolves IDs back to bases.
#[derive(Debug, Clone)]
pub struct PresetDictionary {
    code: CodeParams,
    algo: FingerprintAlgo,
    fingerprints: Vec<Fingerprint>,
    bases: Option<Vec<Bits>>,
    index: HashMap<Fingerprint, u64>,
    dict_id: u64,
}

impl PresetDictionary {
    pub fn new(
        code: CodeParams,
        algo: FingerprintAlgo,
        fingerprints: Vec<Fingerprint>,
        bases: Option<Vec<Bits>>,
    ) -> Result<Self> {
        if code.shortening() > u8::MAX as usize {
            return Err(Error::Config(format!(
                "code {code} has shortening {} which does not fit the dictionary header",
                code.shortening()
            )));
        }
        if fingerprints.len() as u64 > PRIMARY_ID_LIMIT {
            return Err(Error::Config(format!(
                "{} entries exceed the {PRIMARY_ID_LIMIT}-entry id space",
                fingerprints.len()
            )));
        }
        let mut index = HashMap::with_capacity(fingerprints.len());
        for (rank, fp) in fingerprints.iter().enumerate() {
            if fp.algo() != algo {
                return Err(Error::Format("fingerprint algorithm mismatch".into()));
            }
            if index.insert(*fp, rank as u64).is_some() {
                return Err(Error::Format(format!("duplicate fingerprint {fp}")));
            }
        }
        if let Some(bases) = &bases {
            if bases.len() != fingerprints.len() {
                return Err(Error::Format("bases and fingerprints differ in count".into()));
            }
            for (fp, basis) in fingerprints.iter().zip(bases) {
                if basis.len() != code.basis_bits() {
                    return Err(Error::Format(format!(
                        "basis of {} bits in a dictionary for {code}",
                        basis.len()
                    )));
                }
                if Fingerprint::of(basis.as_bytes(), algo) != *fp {
                    return Err(Error::Format(format!("fingerprint {fp} does not match its basis")));
                }
            }
        }
        let mut dict = PresetDictionary {
            code,
            algo,
            fingerprints,
            bases,
            index,
            dict_id: 0,
        };
        dict.dict_id = fnv64(&dict.to_compressor_bytes());
        Ok(dict)
    }

    pub fn dict_id(&self) -> u64 {
        self.dict_id
    }

    pub fn code(&self) -> &CodeParams {
        &self.code
    }

    pub fn algo(&self) -> FingerprintAlgo {
        self.algo
    }

    pub fn len(&self) -> usize {
        self.fingerprints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fingerprints.is_empty()
    }

    pub fn fingerprints(&self) -> &[Fingerprint] {
        &self.fingerprints
    }

    pub fn has_bases(&self) -> bool {
        self.bases.is_some()
    }

    /// Rank of `fp`, which is also its ID.
    pub fn lookup(&self, fp: &Fingerprint) -> Option<u64> {
        self.index.get(fp).copied()
    }

    /// Basis for an ID; `None` past the end or on a compressor-side dictionary.
    pub fn basis(&self, id: u64) -> Option<&Bits> {
        self.bases.as_ref()?.get(usize::try_from(id).ok()?)
    }

    /// The same dictionary without bases.
    pub fn compressor_side(&self) -> PresetDictionary {
        PresetDictionary {
            bases: None,
            ..self.clone()
        }
    }

    fn header(&self, magic: &[u8; 4]) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(magic);
        out.push(VERSION);
        out.push(self.algo.code());
        out.push(self.code.parity_bits());
        out.push(self.code.shortening() as u8);
        out.extend_from_slice(&(self.fingerprints.len() as u32).to_le_bytes());
        out
    }

    pub fn to_compressor_bytes(&self) -> Vec<u8> {
        let mut out = self.header(COMPRESSOR_MAGIC);
        for fp in &self.fingerprints {
            out.extend_from_slice(&fp.to_bytes());
        }
        out
    }

    pub fn to_decompressor_bytes(&self) -> Result<Vec<u8>> {
        let bases = self.bases.as_ref().ok_or_else(|| {
            Error::Config("compressor-side dictionary has no bases to write".into())
        })?;
        let mut out = self.header(DECOMPRESSOR_MAGIC);
        for (fp, basis) in self.fingerprints.iter().zip(bases) {
            out.extend_from_slice(&fp.to_bytes());
            out.extend_from_slice(basis.as_bytes());
        }
        Ok(out)
    }

    /// Parses either file flavor, telling them apart by magic.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated("dictionary header".into()));
        }
        let with_bases = match &bytes[..4] {
            m if m == COMPRESSOR_MAGIC => false,
            m if m == DECOMPRESSOR_MAGIC => true,
            _ => return Err(Error::Format("not a preset dictionary file".into())),
        };
        if bytes[4] != VERSION {
            return Err(Error::Format(format!("unsupported dictionary version {}", bytes[4])));
        }
        let algo = FingerprintAlgo::from_code(bytes[5])?;
        let code = CodeParams::build(bytes[6], bytes[7] as usize)?;
        let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let entry_len = algo.len() + if with_bases { code.basis_bytes() } else { 0 };
        let body = &bytes[HEADER_LEN..];
        if body.len() != count * entry_len {
            return Err(if body.len() < count * entry_len {
                Error::Truncated(format!("dictionary declares {count} entries"))
            } else {
                Error::Format("trailing bytes after dictionary entries".into())
            });
        }
        let mut fingerprints = Vec::with_capacity(count);
        let mut bases = with_bases.then(|| Vec::with_capacity(count));
        for entry in body.chunks_exact(entry_len) {
            fingerprints.push(Fingerprint::from_bytes(&entry[..algo.len()], algo)?);
            if let Some(bases) = bases.as_mut() {
                bases.push(Bits::from_bytes(
                    entry[algo.len()..].to_vec(),
                    code.basis_bits(),
                )?);
            }
        }
        PresetDictionary::new(code, algo, fingerprints, bases)
    }
}

impl PartialEq for PresetDictionary {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
            && self.algo == other.algo
            && self.fingerprints == other.fingerprints
            && self.bases == other.bases
    }
}
