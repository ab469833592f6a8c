//! Systematic Hamming and shortened Hamming codes over GF(2).
//!
//! A code with `m` parity bits has full length `n = 2^m - 1` and message
//! length `k = n - m`. Shortening by `l` drops `l` message positions, giving
//! chunks of `n - l` bits and bases of `k - l` bits.
//!
//! Columns of the parity-check matrix are `m`-bit values where bit `i`
//! (value `1 << i`) is row `i`. The message columns are every value of
//! Hamming weight two or more, in increasing numeric order; shortening
//! drops the last `l` of them. A codeword is laid out as
//! `[message (k - l bits) | parity (m bits)]` and parity position `i`
//! carries the identity column `1 << i`.

use std::fmt;

use crate::bits::{byte_len, Bits};
use crate::error::{param, Result};

/// Largest supported parity bit count.
pub const MAX_PARITY_BITS: u8 = 16;

/// How a syndrome relates to the (possibly shortened) code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyndromeClass {
    /// The chunk is a codeword.
    Zero,
    /// A single flip at this retained bit position explains the syndrome.
    Retained(usize),
    /// The syndrome is the column of a position removed by shortening.
    Removed,
}

/// A (possibly shortened) systematic Hamming code.
///
/// Immutable after construction; share it freely between workers.
#[derive(Clone)]
pub struct CodeParams {
    m: u8,
    l: usize,
    message_columns: Vec<u16>,
    removed_columns: Vec<u16>,
    classes: Vec<SyndromeClass>,
    chunk_table: Vec<[u16; 256]>,
    basis_table: Vec<[u16; 256]>,
}

impl CodeParams {
    /// Builds the code with `m` parity bits shortened by `l` positions.
    pub fn build(m: u8, l: usize) -> Result<Self> {
        if !(3..=MAX_PARITY_BITS).contains(&m) {
            return Err(param(format!(
                "parity bit count must be in 3..={MAX_PARITY_BITS}, got {m}"
            )));
        }
        let n = (1usize << m) - 1;
        let k = n - m as usize;
        if l >= k {
            return Err(param(format!("shortening {l} leaves no message bits (k = {k})")));
        }
        if l > 0 && n - l <= 1usize << (m - 1) {
            return Err(param(format!(
                "shortened length {} must exceed 2^{} = {}",
                n - l,
                m - 1,
                1usize << (m - 1)
            )));
        }

        let mut columns: Vec<u16> = (1..=n as u32)
            .filter(|c| c.count_ones() >= 2)
            .map(|c| c as u16)
            .collect();
        debug_assert_eq!(columns.len(), k);
        let removed_columns = columns.split_off(k - l);
        let message_columns = columns;

        let mut classes = vec![SyndromeClass::Removed; 1 << m];
        classes[0] = SyndromeClass::Zero;
        for (j, &c) in message_columns.iter().enumerate() {
            classes[c as usize] = SyndromeClass::Retained(j);
        }
        for i in 0..m as usize {
            classes[1 << i] = SyndromeClass::Retained(message_columns.len() + i);
        }

        let mut all_columns = message_columns.clone();
        all_columns.extend((0..m).map(|i| 1u16 << i));
        let chunk_table = byte_tables(&all_columns);
        let basis_table = byte_tables(&message_columns);

        Ok(CodeParams {
            m,
            l,
            message_columns,
            removed_columns,
            classes,
            chunk_table,
            basis_table,
        })
    }

    /// Picks the code with the fewest parity bits whose shortened length is
    /// exactly `chunk_bits`.
    pub fn for_chunk_bits(chunk_bits: usize) -> Result<Self> {
        for m in 3..=MAX_PARITY_BITS {
            let n = (1usize << m) - 1;
            if chunk_bits > n {
                continue;
            }
            let l = n - chunk_bits;
            if l == 0 || chunk_bits > 1usize << (m - 1) {
                return CodeParams::build(m, l);
            }
            break;
        }
        Err(param(format!("no Hamming code fits a {chunk_bits}-bit chunk")))
    }

    pub fn parity_bits(&self) -> u8 {
        self.m
    }

    pub fn shortening(&self) -> usize {
        self.l
    }

    /// Full (unshortened) codeword length `2^m - 1`.
    pub fn full_length(&self) -> usize {
        (1 << self.m) - 1
    }

    /// Full (unshortened) message length.
    pub fn full_message_length(&self) -> usize {
        self.full_length() - self.m as usize
    }

    pub fn chunk_bits(&self) -> usize {
        self.full_length() - self.l
    }

    pub fn basis_bits(&self) -> usize {
        self.full_message_length() - self.l
    }

    pub fn chunk_bytes(&self) -> usize {
        byte_len(self.chunk_bits())
    }

    pub fn basis_bytes(&self) -> usize {
        byte_len(self.basis_bits())
    }

    /// Bytes needed to store one deviation.
    pub fn deviation_bytes(&self) -> usize {
        byte_len(self.m as usize)
    }

    pub fn message_columns(&self) -> &[u16] {
        &self.message_columns
    }

    /// Columns dropped by shortening.
    pub fn removed_columns(&self) -> &[u16] {
        &self.removed_columns
    }

    /// Parity-check column at a retained chunk position.
    pub fn column(&self, position: usize) -> u16 {
        let basis_bits = self.basis_bits();
        assert!(position < self.chunk_bits());
        if position < basis_bits {
            self.message_columns[position]
        } else {
            1 << (position - basis_bits)
        }
    }

    pub fn classify(&self, syndrome: u16) -> SyndromeClass {
        self.classes[syndrome as usize]
    }

    /// Parity bits for a basis; bit `i` of the result is parity position `i`.
    pub fn encode_parity(&self, basis: &Bits) -> Result<u16> {
        if basis.len() != self.basis_bits() {
            return Err(param(format!(
                "basis has {} bits, code expects {}",
                basis.len(),
                self.basis_bits()
            )));
        }
        Ok(table_xor(&self.basis_table, basis.as_bytes()))
    }

    pub fn syndrome(&self, chunk: &Bits) -> Result<u16> {
        if chunk.len() != self.chunk_bits() {
            return Err(param(format!(
                "chunk has {} bits, code expects {}",
                chunk.len(),
                self.chunk_bits()
            )));
        }
        Ok(table_xor(&self.chunk_table, chunk.as_bytes()))
    }

    /// `[basis | parity]`, optionally with extra bits XOR-ed into the parity.
    pub(crate) fn codeword_with_parity(&self, basis: &Bits, parity: u16) -> Bits {
        let basis_bits = self.basis_bits();
        // basis padding is zero, so the parity slots start out clear
        let mut bytes = vec![0u8; self.chunk_bytes()];
        bytes[..basis.as_bytes().len()].copy_from_slice(basis.as_bytes());
        let mut word = Bits::from_prefix(&bytes, self.chunk_bits());
        for i in 0..self.m as usize {
            if parity & (1 << i) != 0 {
                word.set(basis_bits + i, true);
            }
        }
        word
    }

    /// The codeword whose message part is `basis`.
    pub fn codeword(&self, basis: &Bits) -> Result<Bits> {
        let parity = self.encode_parity(basis)?;
        Ok(self.codeword_with_parity(basis, parity))
    }
}

impl fmt::Debug for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeParams")
            .field("m", &self.m)
            .field("l", &self.l)
            .field("chunk_bits", &self.chunk_bits())
            .field("basis_bits", &self.basis_bits())
            .finish()
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prime = if self.l > 0 { "'" } else { "" };
        write!(f, "H{prime}({},{})", self.chunk_bits(), self.basis_bits())
    }
}

impl PartialEq for CodeParams {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.l == other.l
    }
}

impl Eq for CodeParams {}

/// Per-byte lookup: entry `[b][v]` is the XOR of the columns of the set bits
/// of value `v` at byte `b`.
fn byte_tables(columns: &[u16]) -> Vec<[u16; 256]> {
    columns
        .chunks(8)
        .map(|cols| {
            let mut table = [0u16; 256];
            for (v, slot) in table.iter_mut().enumerate() {
                for (bit, &c) in cols.iter().enumerate() {
                    if v & (0x80 >> bit) != 0 {
                        *slot ^= c;
                    }
                }
            }
            table
        })
        .collect()
}

fn table_xor(tables: &[[u16; 256]], bytes: &[u8]) -> u16 {
    tables
        .iter()
        .zip(bytes)
        .fold(0, |acc, (t, &b)| acc ^ t[b as usize])
}
