//! Binary label store.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "PTLB" | version u16 | kind u8 | flags u8
//! counts (u32 each) | per-hub arrays | per-label end offsets | flat arrays
//! crc32 of everything before it (u32)
//! ```
//!
//! `kind` is 0 for reachability event labels, 1 for distance event labels
//! and 2 for stop labels. Flag bit 0 marks time-ordered hub ids.

use thiserror::Error;

use crate::labeling::{FlatLabels, LabelMode, LabelSet, StopLabelSet, StopLabels};
use crate::timetable::StopId;

pub const MAGIC: [u8; 4] = *b"PTLB";
pub const VERSION: u16 = 1;

const HEADER_LEN: usize = 8;
const CRC_LEN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum StoreKind {
    ReachabilityLabels = 0,
    DistanceLabels = 1,
    StopLabels = 2,
}

impl StoreKind {
    fn from_byte(b: u8) -> Option<StoreKind> {
        match b {
            0 => Some(StoreKind::ReachabilityLabels),
            1 => Some(StoreKind::DistanceLabels),
            2 => Some(StoreKind::StopLabels),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("not a label store (bad magic)")]
    BadMagic,
    #[error("unsupported store version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown store kind {0}")]
    UnknownKind(u8),
    #[error("expected a {expected:?} store, found {found:?}")]
    WrongKind { expected: &'static str, found: StoreKind },
    #[error("store is truncated")]
    Truncated,
    #[error("store has {0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("store checksum mismatch")]
    ChecksumMismatch,
    #[error("store is inconsistent: {0}")]
    Corrupt(&'static str),
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new(kind: StoreKind, time_ordered: bool) -> Self {
        let mut buf = Vec::new();
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(kind as u8);
        buf.push(time_ordered as u8);
        Writer { buf }
    }

    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("count exceeds u32");
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn slice(&mut self, vs: &[u32]) {
        self.buf.reserve(vs.len() * 4);
        for v in vs {
            self.buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    fn finish(mut self) -> Vec<u8> {
        let crc = crc32fast::hash(&self.buf);
        self.buf.extend_from_slice(&crc.to_le_bytes());
        self.buf
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn u32(&mut self) -> Result<u32, StoreError> {
        let end = self.pos + 4;
        let b = self.bytes.get(self.pos..end).ok_or(StoreError::Truncated)?;
        self.pos = end;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn vec(&mut self, n: usize) -> Result<Vec<u32>, StoreError> {
        let end = n
            .checked_mul(4)
            .and_then(|len| self.pos.checked_add(len))
            .ok_or(StoreError::Truncated)?;
        let b = self.bytes.get(self.pos..end).ok_or(StoreError::Truncated)?;
        self.pos = end;
        Ok(b.chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Checks magic, version and checksum; returns the kind, the flags and a
/// reader positioned after the header.
fn open(bytes: &[u8]) -> Result<(StoreKind, u8, Reader<'_>), StoreError> {
    if bytes.len() < 4 {
        return Err(StoreError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(StoreError::BadMagic);
    }
    if bytes.len() < HEADER_LEN + CRC_LEN {
        return Err(StoreError::Truncated);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(StoreError::UnsupportedVersion(version));
    }
    let kind = StoreKind::from_byte(bytes[6]).ok_or(StoreError::UnknownKind(bytes[6]))?;
    let flags = bytes[7];
    let body = &bytes[..bytes.len() - CRC_LEN];
    let stored = u32::from_le_bytes(bytes[bytes.len() - CRC_LEN..].try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(StoreError::ChecksumMismatch);
    }
    Ok((
        kind,
        flags,
        Reader {
            bytes: body,
            pos: HEADER_LEN,
        },
    ))
}

fn finish(r: Reader<'_>) -> Result<(), StoreError> {
    match r.bytes.len() - r.pos {
        0 => Ok(()),
        n => Err(StoreError::TrailingBytes(n)),
    }
}

fn check_offsets(ends: &[u32], entries: usize) -> Result<Vec<u32>, StoreError> {
    let mut offsets = Vec::with_capacity(ends.len() + 1);
    offsets.push(0);
    let mut prev = 0;
    for &e in ends {
        if e < prev {
            return Err(StoreError::Corrupt("offsets decrease"));
        }
        prev = e;
        offsets.push(e);
    }
    if prev as usize != entries {
        return Err(StoreError::Corrupt("offsets do not match entry count"));
    }
    Ok(offsets)
}

fn check_hubs(hubs: &[u32], num_hubs: usize) -> Result<(), StoreError> {
    if hubs.iter().any(|&h| h as usize >= num_hubs) {
        return Err(StoreError::Corrupt("hub id out of range"));
    }
    Ok(())
}

fn write_flat(w: &mut Writer, f: &FlatLabels, with_dists: bool) {
    w.slice(&f.offsets[1..]);
    w.slice(&f.hubs);
    if with_dists {
        w.slice(&f.dists);
    }
}

fn read_flat(
    r: &mut Reader<'_>,
    labels: usize,
    entries: usize,
    num_hubs: usize,
    with_dists: bool,
) -> Result<FlatLabels, StoreError> {
    let ends = r.vec(labels)?;
    let hubs = r.vec(entries)?;
    let dists = if with_dists { r.vec(entries)? } else { Vec::new() };
    check_hubs(&hubs, num_hubs)?;
    Ok(FlatLabels {
        offsets: check_offsets(&ends, entries)?,
        hubs,
        dists,
    })
}

/// Serializes event labels (either mode).
pub fn serialize_labels(ls: &LabelSet) -> Vec<u8> {
    let kind = match ls.mode {
        LabelMode::Reachability => StoreKind::ReachabilityLabels,
        LabelMode::Distance => StoreKind::DistanceLabels,
    };
    let with_dists = ls.mode == LabelMode::Distance;
    let mut w = Writer::new(kind, ls.time_ordered);
    w.u32(ls.num_vertices());
    w.u32(ls.num_hubs());
    w.u32(ls.forward.num_entries());
    w.u32(ls.backward.num_entries());
    w.slice(&ls.hub_vertex);
    w.slice(&ls.hub_time);
    let stops: Vec<u32> = ls.hub_stop.iter().map(|s| s.0).collect();
    w.slice(&stops);
    write_flat(&mut w, &ls.forward, with_dists);
    write_flat(&mut w, &ls.backward, with_dists);
    w.finish()
}

pub fn deserialize_labels(bytes: &[u8]) -> Result<LabelSet, StoreError> {
    let (kind, flags, mut r) = open(bytes)?;
    let mode = match kind {
        StoreKind::ReachabilityLabels => LabelMode::Reachability,
        StoreKind::DistanceLabels => LabelMode::Distance,
        StoreKind::StopLabels => {
            return Err(StoreError::WrongKind {
                expected: "event label",
                found: kind,
            })
        }
    };
    let with_dists = mode == LabelMode::Distance;
    let vertices = r.u32()? as usize;
    let hubs = r.u32()? as usize;
    let fwd = r.u32()? as usize;
    let bwd = r.u32()? as usize;
    let hub_vertex = r.vec(hubs)?;
    let hub_time = r.vec(hubs)?;
    let hub_stop = r.vec(hubs)?.into_iter().map(StopId).collect();
    let forward = read_flat(&mut r, vertices, fwd, hubs, with_dists)?;
    let backward = read_flat(&mut r, vertices, bwd, hubs, with_dists)?;
    finish(r)?;
    Ok(LabelSet {
        mode,
        forward,
        backward,
        hub_vertex,
        hub_time,
        hub_stop,
        time_ordered: flags & 1 != 0,
    })
}

fn write_stop(w: &mut Writer, s: &StopLabels) {
    w.slice(&s.offsets[1..]);
    w.slice(&s.hubs);
    w.slice(&s.times);
}

fn read_stop(
    r: &mut Reader<'_>,
    stops: usize,
    entries: usize,
    num_hubs: usize,
) -> Result<StopLabels, StoreError> {
    let ends = r.vec(stops)?;
    let hubs = r.vec(entries)?;
    let times = r.vec(entries)?;
    check_hubs(&hubs, num_hubs)?;
    Ok(StopLabels {
        offsets: check_offsets(&ends, entries)?,
        hubs,
        times,
    })
}

pub fn serialize_stop_labels(sls: &StopLabelSet) -> Vec<u8> {
    let mut w = Writer::new(StoreKind::StopLabels, sls.time_ordered);
    w.u32(sls.num_stops());
    w.u32(sls.hub_time.len());
    w.u32(sls.forward.num_entries());
    w.u32(sls.backward.num_entries());
    w.slice(&sls.hub_time);
    write_stop(&mut w, &sls.forward);
    write_stop(&mut w, &sls.backward);
    w.finish()
}

pub fn deserialize_stop_labels(bytes: &[u8]) -> Result<StopLabelSet, StoreError> {
    let (kind, flags, mut r) = open(bytes)?;
    if kind != StoreKind::StopLabels {
        return Err(StoreError::WrongKind {
            expected: "stop label",
            found: kind,
        });
    }
    let stops = r.u32()? as usize;
    let hubs = r.u32()? as usize;
    let fwd = r.u32()? as usize;
    let bwd = r.u32()? as usize;
    let hub_time = r.vec(hubs)?;
    let forward = read_stop(&mut r, stops, fwd, hubs)?;
    let backward = read_stop(&mut r, stops, bwd, hubs)?;
    finish(r)?;
    Ok(StopLabelSet {
        forward,
        backward,
        hub_time,
        time_ordered: flags & 1 != 0,
    })
}

/// Reads the kind byte of a store without validating the rest.
pub fn peek_kind(bytes: &[u8]) -> Result<StoreKind, StoreError> {
    if bytes.len() < HEADER_LEN {
        return Err(StoreError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(StoreError::BadMagic);
    }
    StoreKind::from_byte(bytes[6]).ok_or(StoreError::UnknownKind(bytes[6]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_ea_graph;
    use crate::labeling::{build_labels, build_stop_labels, reassign_hub_ids, LabelOptions};
    use crate::tsv::parse_timetable;

    fn labels() -> (LabelSet, StopLabelSet) {
        let tt = parse_timetable(
            "#stops\nA\t0\nB\t0\nC\t0\n#trips\nx\tA@10>B@20>B@25>C@40\ny\tA@30>C@35\n",
        )
        .unwrap();
        let g = build_ea_graph(&tt);
        let ls = build_labels(&g, LabelOptions::new(LabelMode::Reachability)).unwrap();
        let sls = build_stop_labels(&ls, &tt).unwrap();
        let (sls, ls, _) = reassign_hub_ids(&sls, &ls);
        (ls, sls)
    }

    #[test]
    fn round_trips() {
        let (ls, sls) = labels();
        assert_eq!(deserialize_labels(&serialize_labels(&ls)).unwrap(), ls);
        assert_eq!(deserialize_stop_labels(&serialize_stop_labels(&sls)).unwrap(), sls);
    }

    #[test]
    fn empty_store_is_header_only() {
        let tt = parse_timetable("#stops\n").unwrap();
        let g = build_ea_graph(&tt);
        let ls = build_labels(&g, LabelOptions::new(LabelMode::Reachability)).unwrap();
        let bytes = serialize_labels(&ls);
        assert_eq!(bytes.len(), HEADER_LEN + 16 + CRC_LEN);
        assert_eq!(deserialize_labels(&bytes).unwrap(), ls);
    }

    #[test]
    fn rejects_damage() {
        let (ls, _) = labels();
        let bytes = serialize_labels(&ls);

        let mut flipped = bytes.clone();
        flipped[HEADER_LEN + 20] ^= 0x40;
        assert_eq!(deserialize_labels(&flipped).unwrap_err(), StoreError::ChecksumMismatch);

        assert_eq!(deserialize_labels(&bytes[..6]).unwrap_err(), StoreError::Truncated);

        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert_eq!(deserialize_labels(&magic).unwrap_err(), StoreError::BadMagic);

        let mut version = bytes.clone();
        version[4] = 9;
        assert_eq!(
            deserialize_labels(&version).unwrap_err(),
            StoreError::UnsupportedVersion(9)
        );

        assert!(matches!(
            deserialize_stop_labels(&bytes).unwrap_err(),
            StoreError::WrongKind { .. }
        ));
    }

    #[test]
    fn truncation_with_valid_checksum_is_detected() {
        let (ls, _) = labels();
        let bytes = serialize_labels(&ls);
        // drop the last array word and re-seal the checksum
        let mut body = bytes[..bytes.len() - CRC_LEN - 4].to_vec();
        let crc = crc32fast::hash(&body);
        body.extend_from_slice(&crc.to_le_bytes());
        assert_eq!(deserialize_labels(&body).unwrap_err(), StoreError::Truncated);
    }
}
