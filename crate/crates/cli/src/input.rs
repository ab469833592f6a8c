use std::fs;
use std::path::{Path, PathBuf};

use gdcan::mdf4;
use gdcan::record::parse_raw_log;
use gdcan::{CanRecord, Error, PresetDictionary, Result};

const MDF4_MAGIC: &[u8; 8] = b"MDF     ";

/// Reads records from an MDF4 file or a raw `.gdr` log, telling them apart
/// by content rather than extension.
pub fn read_records(path: &Path) -> Result<Vec<CanRecord>> {
    let bytes = fs::read(path).map_err(|e| io_context(e, path))?;
    let looks_mdf4 = bytes.starts_with(MDF4_MAGIC);
    let named_mdf4 = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mf4") || e.eq_ignore_ascii_case("mdf"));
    if looks_mdf4 || named_mdf4 {
        let file = mdf4::parse(&bytes)?;
        let (raw, _) = mdf4::extract_records(&file)?;
        parse_raw_log(&raw)
    } else {
        parse_raw_log(&bytes)
    }
}

pub fn read_dictionary(path: &Path) -> Result<PresetDictionary> {
    PresetDictionary::from_bytes(&fs::read(path).map_err(|e| io_context(e, path))?)
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_context(e, path))
}

fn io_context(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// `path` with its extension replaced, or `explicit` if given.
pub fn output_path(explicit: Option<&Path>, input: &Path, ext: &str) -> PathBuf {
    explicit.map_or_else(|| input.with_extension(ext), Path::to_path_buf)
}

/// Parses a byte count such as `4096`, `20k`, `100kB` or `1M` (binary units).
pub fn parse_budget(s: &str) -> std::result::Result<usize, String> {
    let t = s.trim();
    let t = t.strip_suffix(['b', 'B']).unwrap_or(t);
    let (digits, scale) = match t.char_indices().last() {
        Some((i, 'k' | 'K')) => (&t[..i], 1usize << 10),
        Some((i, 'm' | 'M')) => (&t[..i], 1 << 20),
        Some((i, 'g' | 'G')) => (&t[..i], 1 << 30),
        _ => (t, 1),
    };
    digits
        .trim()
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(scale))
        .ok_or_else(|| format!("invalid byte count {s:?}"))
}
