//! Chunk <-> (basis, deviation) mapping.
//!
//! The deviation is always the chunk's syndrome. Three cases:
//!
//! 1. syndrome zero: the chunk is a codeword and its message bits are the basis.
//! 2. syndrome equals the column of retained position `j`: flip `j` to reach
//!    the nearest codeword, whose message bits are the basis.
//! 3. syndrome equals a column removed by shortening: no single retained
//!    flip explains it, so the message bits are taken unchanged and the
//!    syndrome is XOR-ed back into the parity on reconstruction.

use crate::bits::Bits;
use crate::error::{param, Result};
use crate::hamming::{CodeParams, SyndromeClass};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisDeviation {
    pub basis: Bits,
    pub deviation: u16,
}

pub fn to_basis_deviation(chunk: &Bits, code: &CodeParams) -> Result<BasisDeviation> {
    let syndrome = code.syndrome(chunk)?;
    let basis_bits = code.basis_bits();
    let basis = match code.classify(syndrome) {
        SyndromeClass::Retained(j) if j < basis_bits => {
            let mut basis = chunk.prefix(basis_bits);
            basis.flip(j);
            basis
        }
        // parity-position flips and removed columns leave the message intact
        SyndromeClass::Zero | SyndromeClass::Retained(_) | SyndromeClass::Removed => {
            chunk.prefix(basis_bits)
        }
    };
    Ok(BasisDeviation {
        basis,
        deviation: syndrome,
    })
}

pub fn from_basis_deviation(pair: &BasisDeviation, code: &CodeParams) -> Result<Bits> {
    if pair.deviation as usize >= 1 << code.parity_bits() {
        return Err(param(format!(
            "deviation {:#x} wider than {} bits",
            pair.deviation,
            code.parity_bits()
        )));
    }
    let parity = code.encode_parity(&pair.basis)?;
    Ok(match code.classify(pair.deviation) {
        SyndromeClass::Zero => code.codeword_with_parity(&pair.basis, parity),
        SyndromeClass::Retained(j) => {
            let mut word = code.codeword_with_parity(&pair.basis, parity);
            word.flip(j);
            word
        }
        SyndromeClass::Removed => code.codeword_with_parity(&pair.basis, parity ^ pair.deviation),
    })
}
