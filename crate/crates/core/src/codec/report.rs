use crate::codec::{StreamHeader, Token, TokenReader, HEADER_LEN};
use crate::error::Result;
use crate::record::RECORD_LEN;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenCounts {
    pub ref_primary: u64,
    pub ref_ram: u64,
    pub new_basis: u64,
    pub reset: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub header: StreamHeader,
    pub total_bytes: u64,
    pub raw_bytes: u64,
    pub tokens: TokenCounts,
    /// Bytes spent on inline bases, excluding their control prefix and deviation.
    pub basis_bytes: u64,
    /// `raw_bytes / total_bytes`; `None` for an empty stream.
    pub gain: Option<f64>,
}

/// Uncompressed size over compressed size.
pub fn compression_gain(raw_bytes: u64, compressed_bytes: u64) -> Option<f64> {
    (raw_bytes > 0 && compressed_bytes > 0).then(|| raw_bytes as f64 / compressed_bytes as f64)
}

/// Walks a container's tokens without resolving any bases.
pub fn compressed_size_report(container: &[u8]) -> Result<SizeReport> {
    let header = StreamHeader::parse(container)?;
    let mut tokens = TokenCounts::default();
    for token in TokenReader::new(&container[HEADER_LEN..], &header) {
        match token? {
            Token::RefPrimary { .. } => tokens.ref_primary += 1,
            Token::RefRam { .. } => tokens.ref_ram += 1,
            Token::NewBasis { .. } => tokens.new_basis += 1,
            Token::Reset => tokens.reset += 1,
            Token::EndOfStream => {}
        }
    }
    let raw_bytes = header.record_count * RECORD_LEN as u64;
    let total_bytes = container.len() as u64;
    Ok(SizeReport {
        basis_bytes: tokens.new_basis * header.chunking.code.basis_bytes() as u64,
        gain: compression_gain(raw_bytes, total_bytes),
        header,
        total_bytes,
        raw_bytes,
        tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_ratio() {
        assert_eq!(compression_gain(5400, 2700), Some(2.0));
        assert_eq!(compression_gain(0, 30), None);
    }
}
