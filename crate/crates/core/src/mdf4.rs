//! Minimal MDF4 reader for single-group, fixed-length record logs, plus a
//! writer producing such files for tests and fixtures.
//!
//! Only the hierarchy needed to reach the records is interpreted:
//! identification block, then `HD -> DG -> CG -> CN` and the `DT` data block
//! of the data group. Any other block reached through a link is kept as an
//! opaque [`Block`].
//!
//! Every block starts with a 24-byte header: `"##" + type`, 4 reserved bytes,
//! the block length (u64) and the link count (u64), followed by the links
//! (u64 absolute file offsets, zero for none) and the block data.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::record::{parse_raw_log, CanRecord, RECORD_LEN};

const ID_LEN: usize = 64;
const BLOCK_HEADER_LEN: usize = 24;
const ID_FILE: &[u8; 8] = b"MDF     ";
const VERSION_STR: &[u8; 8] = b"4.10    ";
const VERSION_NUM: u16 = 410;
const PROGRAM: &[u8; 8] = b"gdcan   ";

const CG_FLAG_VLSD: u16 = 0x0001;

/// One raw block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub offset: u64,
    pub block_type: [u8; 2],
    pub length: u64,
    pub links: Vec<u64>,
    pub data: Vec<u8>,
}

impl Block {
    pub fn type_str(&self) -> String {
        String::from_utf8_lossy(&self.block_type).into_owned()
    }

    fn link(&self, i: usize) -> u64 {
        self.links.get(i).copied().unwrap_or(0)
    }

    fn data_u64(&self, at: usize) -> Result<u64> {
        self.data
            .get(at..at + 8)
            .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| self.short())
    }

    fn data_u32(&self, at: usize) -> Result<u32> {
        self.data
            .get(at..at + 4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| self.short())
    }

    fn data_u16(&self, at: usize) -> Result<u16> {
        self.data
            .get(at..at + 2)
            .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| self.short())
    }

    fn short(&self) -> Error {
        Error::Format(format!(
            "{} block at {:#x} too short for its fields",
            self.type_str(),
            self.offset
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub block: Block,
    pub name: Option<String>,
    pub byte_offset: u32,
    pub bit_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelGroup {
    pub block: Block,
    pub cycle_count: u64,
    pub flags: u16,
    pub record_bytes: u32,
    pub invalidation_bytes: u32,
    pub channels: Vec<Channel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataGroup {
    pub block: Block,
    pub record_id_size: u8,
    pub channel_groups: Vec<ChannelGroup>,
    pub data: Option<Block>,
}

/// Parsed block tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdf4File {
    pub version: u16,
    pub header: Block,
    pub data_groups: Vec<DataGroup>,
    /// Blocks reached by a link but not interpreted.
    pub other: Vec<Block>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    visited: HashSet<u64>,
}

impl<'a> Reader<'a> {
    fn block(&self, offset: u64) -> Result<Block> {
        let len = self.bytes.len() as u64;
        let start = usize::try_from(offset)
            .ok()
            .filter(|_| offset.checked_add(BLOCK_HEADER_LEN as u64).is_some_and(|e| e <= len))
            .ok_or_else(|| Error::Truncated(format!("block header at {offset:#x} past end of file")))?;
        let head = &self.bytes[start..start + BLOCK_HEADER_LEN];
        if &head[0..2] != b"##" {
            return Err(Error::Format(format!("no block at {offset:#x}")));
        }
        let block_type = [head[2], head[3]];
        let length = u64::from_le_bytes(head[8..16].try_into().unwrap());
        let link_count = u64::from_le_bytes(head[16..24].try_into().unwrap());
        let links_end = link_count
            .checked_mul(8)
            .and_then(|l| l.checked_add(BLOCK_HEADER_LEN as u64))
            .filter(|&e| e <= length)
            .ok_or_else(|| {
                Error::Format(format!("block at {offset:#x}: {link_count} links exceed length {length}"))
            })?;
        if offset.checked_add(length).is_none_or(|e| e > len) {
            return Err(Error::Truncated(format!(
                "block at {offset:#x} declares {length} bytes, file has {}",
                len - offset
            )));
        }
        let body = &self.bytes[start..start + length as usize];
        let links = body[BLOCK_HEADER_LEN..links_end as usize]
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Block {
            offset,
            block_type,
            length,
            links,
            data: body[links_end as usize..].to_vec(),
        })
    }

    /// Reads a block that is part of the followed hierarchy; each may be
    /// visited once.
    fn structural(&mut self, offset: u64, expected: &[u8; 2]) -> Result<Block> {
        if !self.visited.insert(offset) {
            return Err(Error::Format(format!("cyclic link to {offset:#x}")));
        }
        let block = self.block(offset)?;
        if &block.block_type != expected {
            return Err(Error::Format(format!(
                "expected {} block at {offset:#x}, found {}",
                String::from_utf8_lossy(expected),
                block.type_str()
            )));
        }
        Ok(block)
    }

    fn text(&self, offset: u64) -> Result<Option<String>> {
        if offset == 0 {
            return Ok(None);
        }
        let block = self.block(offset)?;
        if &block.block_type != b"TX" {
            return Ok(None);
        }
        let end = block.data.iter().position(|&b| b == 0).unwrap_or(block.data.len());
        Ok(Some(String::from_utf8_lossy(&block.data[..end]).into_owned()))
    }

    fn channel_group(&mut self, offset: u64) -> Result<ChannelGroup> {
        let block = self.structural(offset, b"CG")?;
        let mut channels = Vec::new();
        let mut next = block.link(1);
        while next != 0 {
            let cn = self.structural(next, b"CN")?;
            next = cn.link(0);
            channels.push(Channel {
                name: self.text(cn.link(2))?,
                byte_offset: cn.data_u32(4)?,
                bit_count: cn.data_u32(8)?,
                block: cn,
            });
        }
        Ok(ChannelGroup {
            cycle_count: block.data_u64(8)?,
            flags: block.data_u16(16)?,
            record_bytes: block.data_u32(24)?,
            invalidation_bytes: block.data_u32(28)?,
            channels,
            block,
        })
    }

    fn data_group(&mut self, block: Block) -> Result<DataGroup> {
        let record_id_size = *block.data.first().ok_or_else(|| block.short())?;
        let mut channel_groups = Vec::new();
        let mut next = block.link(1);
        while next != 0 {
            let cg = self.channel_group(next)?;
            next = cg.block.link(0);
            channel_groups.push(cg);
        }
        let data = match block.link(2) {
            0 => None,
            at => {
                if !self.visited.insert(at) {
                    return Err(Error::Format(format!("cyclic link to {at:#x}")));
                }
                Some(self.block(at)?)
            }
        };
        Ok(DataGroup {
            block,
            record_id_size,
            channel_groups,
            data,
        })
    }
}

/// Parses an in-memory MDF4 file.
pub fn parse(bytes: &[u8]) -> Result<Mdf4File> {
    if bytes.len() < ID_LEN || &bytes[..8] != ID_FILE {
        return Err(Error::NotMdf4("missing identification block".into()));
    }
    let version = u16::from_le_bytes(bytes[28..30].try_into().unwrap());
    if version < 400 {
        return Err(Error::UnsupportedLayout(format!("MDF version {version} is not 4.x")));
    }
    let mut reader = Reader {
        bytes,
        visited: HashSet::new(),
    };
    let header = reader.structural(ID_LEN as u64, b"HD")?;

    let mut data_groups = Vec::new();
    let mut next = header.link(0);
    while next != 0 {
        let dg = reader.structural(next, b"DG")?;
        next = dg.link(0);
        data_groups.push(reader.data_group(dg)?);
    }

    let mut other = Vec::new();
    for &link in header.links.iter().skip(1).filter(|&&l| l != 0) {
        other.push(reader.block(link)?);
    }
    Ok(Mdf4File {
        version,
        header,
        data_groups,
        other,
    })
}

pub fn open_file(path: impl AsRef<Path>) -> Result<Mdf4File> {
    parse(&std::fs::read(path)?)
}

/// Concatenated record bytes of the single data group, with the record count.
pub fn extract_records(file: &Mdf4File) -> Result<(Vec<u8>, usize)> {
    let [dg] = file.data_groups.as_slice() else {
        return Err(Error::UnsupportedLayout(format!(
            "expected one data group, found {}",
            file.data_groups.len()
        )));
    };
    let [cg] = dg.channel_groups.as_slice() else {
        return Err(Error::UnsupportedLayout(format!(
            "expected one channel group, found {}",
            dg.channel_groups.len()
        )));
    };
    if dg.record_id_size != 0 {
        return Err(Error::UnsupportedLayout("record ids present".into()));
    }
    if cg.flags & CG_FLAG_VLSD != 0 {
        return Err(Error::UnsupportedLayout("variable-length records".into()));
    }
    if cg.record_bytes as usize != RECORD_LEN || cg.invalidation_bytes != 0 {
        return Err(Error::UnsupportedLayout(format!(
            "record length {} + {} invalidation bytes, expected {RECORD_LEN}",
            cg.record_bytes, cg.invalidation_bytes
        )));
    }
    let payload = match &dg.data {
        None => Vec::new(),
        Some(b) if &b.block_type == b"DT" => b.data.clone(),
        Some(b) => {
            return Err(Error::UnsupportedLayout(format!(
                "data stored in a {} block",
                b.type_str()
            )))
        }
    };
    if payload.len() % RECORD_LEN != 0 {
        return Err(Error::Format(format!(
            "DT payload of {} bytes is not a whole number of records",
            payload.len()
        )));
    }
    let count = payload.len() / RECORD_LEN;
    Ok((payload, count))
}

/// Opens a file and returns its validated records.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<CanRecord>> {
    let file = open_file(path)?;
    let (bytes, _) = extract_records(&file)?;
    parse_raw_log(&bytes)
}

// (name, byte offset, bit count, channel type, sync type, data type)
const CHANNELS: [(&str, u32, u32, u8, u8, u8); 10] = [
    ("Timestamp", 0, 64, 2, 1, 0),
    ("CAN_DataFrame.ID", 8, 32, 0, 0, 0),
    ("CAN_DataFrame.IDE", 12, 8, 0, 0, 0),
    ("CAN_DataFrame.DLC", 13, 8, 0, 0, 0),
    ("CAN_DataFrame.EDL", 14, 8, 0, 0, 0),
    ("CAN_DataFrame.BRS", 15, 8, 0, 0, 0),
    ("CAN_DataFrame.Dir", 16, 8, 0, 0, 0),
    ("CAN_DataFrame.BusChannel", 17, 8, 0, 0, 0),
    ("CAN_DataFrame.DataLength", 18, 8, 0, 0, 0),
    ("CAN_DataFrame.DataBytes", 19, 64, 0, 0, 10),
];

struct Writer {
    out: Vec<u8>,
}

impl Writer {
    fn block(&mut self, ty: &[u8; 2], links: &[u64], data: &[u8]) -> u64 {
        let offset = self.out.len() as u64;
        let length = (BLOCK_HEADER_LEN + 8 * links.len() + data.len()) as u64;
        self.out.extend_from_slice(b"##");
        self.out.extend_from_slice(ty);
        self.out.extend_from_slice(&[0; 4]);
        self.out.extend_from_slice(&length.to_le_bytes());
        self.out.extend_from_slice(&(links.len() as u64).to_le_bytes());
        for l in links {
            self.out.extend_from_slice(&l.to_le_bytes());
        }
        self.out.extend_from_slice(data);
        offset
    }

    fn next_offset(&self, ty_len: usize) -> u64 {
        (self.out.len() + ty_len) as u64
    }

    fn patch_link(&mut self, block: u64, index: usize, target: u64) {
        let at = block as usize + BLOCK_HEADER_LEN + 8 * index;
        self.out[at..at + 8].copy_from_slice(&target.to_le_bytes());
    }
}

fn text_data(s: &str) -> Vec<u8> {
    let mut data = s.as_bytes().to_vec();
    data.push(0);
    data.resize(data.len().next_multiple_of(8), 0);
    data
}

/// Writes a minimal MDF4 file holding `records` in one DT block.
pub fn write_fixture(records: &[CanRecord]) -> Vec<u8> {
    write_fixture_with_extra_block(records, None)
}

/// Like [`write_fixture`], optionally placing an extra block of the given
/// type between the header and the data group, linked as the header comment.
pub fn write_fixture_with_extra_block(
    records: &[CanRecord],
    extra: Option<([u8; 2], &[u8])>,
) -> Vec<u8> {
    let mut w = Writer {
        out: Vec::with_capacity(1024 + records.len() * RECORD_LEN),
    };

    let mut id = [0u8; ID_LEN];
    id[0..8].copy_from_slice(ID_FILE);
    id[8..16].copy_from_slice(VERSION_STR);
    id[16..24].copy_from_slice(PROGRAM);
    id[28..30].copy_from_slice(&VERSION_NUM.to_le_bytes());
    w.out.extend_from_slice(&id);

    // start time, tz/dst offsets, time flags/class, flags, reserved, angle, distance
    let hd = w.block(b"HD", &[0; 6], &[0; 32]);
    if let Some((ty, payload)) = extra {
        let at = w.block(&ty, &[], payload);
        w.patch_link(hd, 5, at);
    }

    let dg = w.block(b"DG", &[0; 4], &[0; 8]);
    w.patch_link(hd, 0, dg);

    let mut cg_data = Vec::with_capacity(32);
    cg_data.extend_from_slice(&0u64.to_le_bytes()); // record id
    cg_data.extend_from_slice(&(records.len() as u64).to_le_bytes()); // cycle count
    cg_data.extend_from_slice(&0u16.to_le_bytes()); // flags
    cg_data.extend_from_slice(&0u16.to_le_bytes()); // path separator
    cg_data.extend_from_slice(&[0; 4]);
    cg_data.extend_from_slice(&(RECORD_LEN as u32).to_le_bytes());
    cg_data.extend_from_slice(&0u32.to_le_bytes()); // invalidation bytes
    let cg = w.block(b"CG", &[0; 6], &cg_data);
    w.patch_link(dg, 1, cg);

    let mut prev_cn: Option<u64> = None;
    for (name, byte_offset, bit_count, cn_type, sync_type, data_type) in CHANNELS {
        let mut data = vec![cn_type, sync_type, data_type, 0];
        data.extend_from_slice(&byte_offset.to_le_bytes());
        data.extend_from_slice(&bit_count.to_le_bytes());
        data.extend_from_slice(&0u32.to_le_bytes()); // flags
        data.extend_from_slice(&0u32.to_le_bytes()); // invalidation bit
        data.extend_from_slice(&[0, 0, 0, 0]); // precision, reserved, attachment count
        data.extend_from_slice(&[0; 48]); // value and limit ranges
        let cn = w.block(b"CN", &[0; 8], &data);
        let tx = w.block(b"TX", &[], &text_data(name));
        w.patch_link(cn, 2, tx);
        match prev_cn {
            Some(p) => w.patch_link(p, 0, cn),
            None => w.patch_link(cg, 1, cn),
        }
        prev_cn = Some(cn);
    }

    let dt = w.next_offset(0);
    let payload: Vec<u8> = records.iter().flat_map(|r| r.to_bytes()).collect();
    w.block(b"DT", &[], &payload);
    w.patch_link(dg, 2, dt);
    w.out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(n: usize) -> Vec<CanRecord> {
        (0..n)
            .map(|i| CanRecord {
                timestamp: i as u64 * 10,
                identifier: (i % 2048) as u32,
                data_length: 1,
                data: [i as u8, 0, 0, 0, 0, 0, 0, 0],
                ..Default::default()
            })
            .collect()
    }

    #[test]
    fn tree_shape() {
        let file = parse(&write_fixture(&recs(3))).unwrap();
        assert_eq!(file.version, 410);
        assert_eq!(file.data_groups.len(), 1);
        let dg = &file.data_groups[0];
        assert_eq!(dg.channel_groups.len(), 1);
        let cg = &dg.channel_groups[0];
        assert_eq!(cg.record_bytes, 27);
        assert_eq!(cg.cycle_count, 3);
        assert_eq!(cg.channels.len(), 10);
        assert_eq!(cg.channels[0].name.as_deref(), Some("Timestamp"));
        assert_eq!(cg.channels[9].byte_offset, 19);
        assert_eq!(dg.data.as_ref().unwrap().type_str(), "DT");
    }

    #[test]
    fn empty_and_zero_payloads() {
        assert!(matches!(parse(&[]), Err(Error::NotMdf4(_))));
        let file = parse(&write_fixture(&[])).unwrap();
        assert_eq!(extract_records(&file).unwrap(), (Vec::new(), 0));
        let file = parse(&write_fixture(&[CanRecord::default(); 2])).unwrap();
        assert_eq!(extract_records(&file).unwrap(), (vec![0u8; 54], 2));
    }

    #[test]
    fn unknown_block_skipped() {
        let bytes = write_fixture_with_extra_block(&recs(5), Some((*b"XY", &[1, 2, 3, 4, 5, 6, 7, 8])));
        let file = parse(&bytes).unwrap();
        assert_eq!(file.other.len(), 1);
        assert_eq!(file.other[0].type_str(), "XY");
        let (payload, n) = extract_records(&file).unwrap();
        assert_eq!(n, 5);
        assert_eq!(parse_raw_log(&payload).unwrap(), recs(5));
    }

    fn cg_offset(bytes: &[u8]) -> usize {
        parse(bytes).unwrap().data_groups[0].channel_groups[0].block.offset as usize
    }

    #[test]
    fn unsupported_layouts() {
        let mut bytes = write_fixture(&recs(2));
        let cg = cg_offset(&bytes);
        // record length field: header + 6 links + 24 data bytes in
        let at = cg + BLOCK_HEADER_LEN + 48 + 24;
        bytes[at..at + 4].copy_from_slice(&30u32.to_le_bytes());
        assert!(matches!(
            extract_records(&parse(&bytes).unwrap()),
            Err(Error::UnsupportedLayout(_))
        ));

        let mut bytes = write_fixture(&recs(2));
        let flags = cg + BLOCK_HEADER_LEN + 48 + 16;
        bytes[flags] = 1;
        assert!(matches!(
            extract_records(&parse(&bytes).unwrap()),
            Err(Error::UnsupportedLayout(_))
        ));

        let mut file = parse(&write_fixture(&recs(2))).unwrap();
        let extra = file.data_groups[0].channel_groups[0].clone();
        file.data_groups[0].channel_groups.push(extra);
        assert!(matches!(extract_records(&file), Err(Error::UnsupportedLayout(_))));
    }

    #[test]
    fn cycles_detected() {
        let mut bytes = write_fixture(&recs(1));
        let cg = cg_offset(&bytes);
        // point the CG's next-CG link back at itself
        let at = cg + BLOCK_HEADER_LEN;
        bytes[at..at + 8].copy_from_slice(&(cg as u64).to_le_bytes());
        assert!(matches!(parse(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn mdf3_rejected() {
        let mut bytes = write_fixture(&recs(1));
        bytes[28..30].copy_from_slice(&330u16.to_le_bytes());
        assert!(matches!(parse(&bytes), Err(Error::UnsupportedLayout(_))));
    }
}
