//! The per-cover stego segment and its JSON mapping-graph header.
//!
//! Wire format, all integers big-endian:
//!
//! ```text
//! +---------+------------------+----------------------+-------------------+
//! | "JKVG1" | header_len (u32) | JSON header (UTF-8)  | raw chunk bytes   |
//! | 5 bytes | 4 bytes          | header_len bytes     | sum of lengths    |
//! +---------+------------------+----------------------+-------------------+
//! ```
//!
//! The header is canonical JSON: keys in the fixed order below, no
//! whitespace, integers only.
//!
//! ```text
//! {"num_payload_images":N,"num_cover_images":M,"cover_index":I,
//!  "payloads":[{"payload_id":..,"height":..,"width":..,"channels":3,
//!               "chunk_count":..,"chunk_size":..,"total_bytes":..},...],
//!  "directory":[[payload_id,graph_position,offset,length,crc16],...]}
//! ```
//!
//! `payloads` lists every payload of the job in every cover; `directory`
//! lists only the chunks this cover carries, in chunk-section order.
//! `offset` is relative to the start of the chunk section and `crc16` is
//! CRC-16/ARC over the chunk bytes.

use crc::{Crc, CRC_16_ARC};
use serde::{Deserialize, Serialize};

use crate::chunking::Chunk;
use crate::error::{Error, Result};
use crate::image::CHANNELS;

pub const MAGIC: &[u8; 5] = b"JKVG1";

/// Magic plus the header length field.
pub const PREFIX_LEN: usize = 9;

const CHECKSUM: Crc<u16> = Crc::<u16>::new(&CRC_16_ARC);

pub fn chunk_checksum(data: &[u8]) -> u16 {
    CHECKSUM.checksum(data)
}

/// Shape and chunking of one payload image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayloadMetadata {
    pub payload_id: u32,
    pub height: u32,
    pub width: u32,
    pub channels: u32,
    pub chunk_count: u32,
    pub chunk_size: u32,
    pub total_bytes: u64,
}

impl PayloadMetadata {
    pub fn new(payload_id: u32, width: u32, height: u32, chunk_size: u32) -> Self {
        let total_bytes = width as u64 * height as u64 * CHANNELS as u64;
        Self {
            payload_id,
            height,
            width,
            channels: CHANNELS as u32,
            chunk_count: total_bytes.div_ceil(chunk_size.max(1) as u64) as u32,
            chunk_size,
            total_bytes,
        }
    }

    /// Byte length of the chunk at `graph_position`.
    pub fn chunk_len(&self, graph_position: u32) -> u64 {
        let start = graph_position as u64 * self.chunk_size as u64;
        (self.total_bytes - start).min(self.chunk_size as u64)
    }

    fn check(&self) -> std::result::Result<(), String> {
        let id = self.payload_id;
        if self.width == 0 || self.height == 0 {
            return Err(format!("payload {id}: zero dimension"));
        }
        if self.channels != CHANNELS as u32 {
            return Err(format!(
                "payload {id}: unsupported channel count {}",
                self.channels
            ));
        }
        if self.chunk_size == 0 {
            return Err(format!("payload {id}: zero chunk size"));
        }
        let expected = Self::new(id, self.width, self.height, self.chunk_size);
        if self.total_bytes != expected.total_bytes {
            return Err(format!(
                "payload {id}: total_bytes {} != {}x{}x3",
                self.total_bytes, self.width, self.height
            ));
        }
        if self.chunk_count != expected.chunk_count {
            return Err(format!(
                "payload {id}: chunk_count {} inconsistent with total_bytes and chunk_size",
                self.chunk_count
            ));
        }
        Ok(())
    }
}

/// Locates one chunk inside a segment's chunk section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "EntryTuple", into = "EntryTuple")]
pub struct ChunkDirectoryEntry {
    pub payload_id: u32,
    pub graph_position: u32,
    pub offset: u64,
    pub length: u32,
    pub checksum: u16,
}

type EntryTuple = (u32, u32, u64, u32, u16);

impl From<EntryTuple> for ChunkDirectoryEntry {
    fn from((payload_id, graph_position, offset, length, checksum): EntryTuple) -> Self {
        Self {
            payload_id,
            graph_position,
            offset,
            length,
            checksum,
        }
    }
}

impl From<ChunkDirectoryEntry> for EntryTuple {
    fn from(e: ChunkDirectoryEntry) -> Self {
        (
            e.payload_id,
            e.graph_position,
            e.offset,
            e.length,
            e.checksum,
        )
    }
}

impl ChunkDirectoryEntry {
    /// Directory for `chunks` laid out back to back in the given order.
    pub fn for_chunks(chunks: &[Chunk]) -> Vec<Self> {
        let mut offset = 0u64;
        chunks
            .iter()
            .map(|c| {
                let entry = Self {
                    payload_id: c.payload_id,
                    graph_position: c.graph_position,
                    offset,
                    length: c.data.len() as u32,
                    checksum: chunk_checksum(&c.data),
                };
                offset += c.data.len() as u64;
                entry
            })
            .collect()
    }

    /// Length of this entry's JSON text, without the separating comma.
    pub fn json_len(&self) -> usize {
        // "[a,b,c,d,e]": five numbers, four commas, two brackets
        digits(self.payload_id as u64)
            + digits(self.graph_position as u64)
            + digits(self.offset)
            + digits(self.length as u64)
            + digits(self.checksum as u64)
            + 6
    }
}

fn digits(mut v: u64) -> usize {
    let mut n = 1;
    while v >= 10 {
        v /= 10;
        n += 1;
    }
    n
}

/// The mapping-graph header of one cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverManifest {
    pub num_payload_images: u32,
    pub num_cover_images: u32,
    pub cover_index: u32,
    pub payloads: Vec<PayloadMetadata>,
    pub directory: Vec<ChunkDirectoryEntry>,
}

impl CoverManifest {
    pub fn chunk_section_len(&self) -> u64 {
        self.directory.iter().map(|e| e.length as u64).sum()
    }

    /// Total segment length: prefix, header and chunk section.
    pub fn segment_len(&self) -> u64 {
        segment_overhead(self) as u64 + self.chunk_section_len()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.num_payload_images == 0 || self.num_payload_images as usize != self.payloads.len() {
            return Err(format!(
                "num_payload_images {} but {} payload entries",
                self.num_payload_images,
                self.payloads.len()
            ));
        }
        if self.cover_index >= self.num_cover_images {
            return Err(format!(
                "cover_index {} out of range for {} covers",
                self.cover_index, self.num_cover_images
            ));
        }
        for (i, meta) in self.payloads.iter().enumerate() {
            if meta.payload_id as usize != i {
                return Err(format!(
                    "payload entry {i} has payload_id {}",
                    meta.payload_id
                ));
            }
            meta.check()?;
        }
        let mut offset = 0u64;
        for entry in &self.directory {
            let meta = self
                .payloads
                .get(entry.payload_id as usize)
                .ok_or_else(|| {
                    format!("directory references unknown payload {}", entry.payload_id)
                })?;
            if entry.graph_position >= meta.chunk_count {
                return Err(format!(
                    "payload {} graph position {} >= chunk count {}",
                    entry.payload_id, entry.graph_position, meta.chunk_count
                ));
            }
            if entry.length as u64 != meta.chunk_len(entry.graph_position) {
                return Err(format!(
                    "payload {} chunk {} has length {}, expected {}",
                    entry.payload_id,
                    entry.graph_position,
                    entry.length,
                    meta.chunk_len(entry.graph_position)
                ));
            }
            if entry.offset != offset {
                return Err(format!(
                    "directory entry at offset {} should start at {offset}",
                    entry.offset
                ));
            }
            offset += entry.length as u64;
        }
        Ok(())
    }
}

/// Canonical JSON text of the header.
pub fn header_bytes(manifest: &CoverManifest) -> Vec<u8> {
    serde_json::to_vec(manifest).expect("manifest serialization is infallible")
}

/// All non-payload bytes of the segment: prefix plus header.
pub fn segment_overhead(manifest: &CoverManifest) -> usize {
    PREFIX_LEN + header_bytes(manifest).len()
}

pub fn serialize_segment(manifest: &CoverManifest, chunks: &[Chunk]) -> Result<Vec<u8>> {
    manifest.check().map_err(Error::Consistency)?;
    if manifest.directory.len() != chunks.len() {
        return Err(Error::Consistency(format!(
            "{} directory entries for {} chunks",
            manifest.directory.len(),
            chunks.len()
        )));
    }
    for (entry, chunk) in manifest.directory.iter().zip(chunks) {
        if entry.payload_id != chunk.payload_id
            || entry.graph_position != chunk.graph_position
            || entry.length as usize != chunk.data.len()
            || entry.checksum != chunk_checksum(&chunk.data)
        {
            return Err(Error::Consistency(format!(
                "entry ({}, {}) does not describe chunk ({}, {})",
                entry.payload_id, entry.graph_position, chunk.payload_id, chunk.graph_position
            )));
        }
    }

    let header = header_bytes(manifest);
    let header_len = u32::try_from(header.len())
        .map_err(|_| Error::Consistency(format!("header of {} bytes exceeds u32", header.len())))?;
    let section_len = manifest.chunk_section_len() as usize;
    let mut out = Vec::with_capacity(PREFIX_LEN + header.len() + section_len);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&header_len.to_be_bytes());
    out.extend_from_slice(&header);
    for chunk in chunks {
        out.extend_from_slice(&chunk.data);
    }
    Ok(out)
}

/// Validates the 9-byte prefix and returns the header length.
pub fn parse_prefix(bytes: &[u8]) -> Result<u32> {
    let n = bytes.len().min(MAGIC.len());
    if bytes[..n] != MAGIC[..n] {
        return Err(Error::NotStego);
    }
    if bytes.len() < PREFIX_LEN {
        return Err(Error::Truncated {
            needed: PREFIX_LEN as u64,
            available: bytes.len() as u64,
        });
    }
    Ok(u32::from_be_bytes([bytes[5], bytes[6], bytes[7], bytes[8]]))
}

/// Parses and validates a JSON header. Non-canonical text is rejected so
/// that every accepted header re-serializes to the exact embedded bytes.
pub fn parse_header(header: &[u8]) -> Result<CoverManifest> {
    let manifest: CoverManifest =
        serde_json::from_slice(header).map_err(|e| Error::ManifestCorrupt(e.to_string()))?;
    if header_bytes(&manifest) != header {
        return Err(Error::ManifestCorrupt(
            "header is not in canonical form".into(),
        ));
    }
    manifest.check().map_err(Error::ManifestCorrupt)?;
    Ok(manifest)
}

/// Slices a chunk section into chunks and verifies their checksums.
pub fn split_section(manifest: &CoverManifest, section: &[u8]) -> Result<Vec<Chunk>> {
    let needed = manifest.chunk_section_len();
    if (section.len() as u64) < needed {
        return Err(Error::Truncated {
            needed,
            available: section.len() as u64,
        });
    }
    manifest
        .directory
        .iter()
        .map(|e| {
            let start = e.offset as usize;
            let data = section[start..start + e.length as usize].to_vec();
            if chunk_checksum(&data) != e.checksum {
                return Err(Error::Corruption(format!(
                    "checksum mismatch for payload {} chunk {} in cover {}",
                    e.payload_id, e.graph_position, manifest.cover_index
                )));
            }
            Ok(Chunk {
                payload_id: e.payload_id,
                graph_position: e.graph_position,
                data,
            })
        })
        .collect()
}

/// Parses a segment from its first byte. Bytes after the segment are ignored.
pub fn parse_segment(bytes: &[u8]) -> Result<(CoverManifest, Vec<Chunk>)> {
    let header_len = parse_prefix(bytes)? as usize;
    let header_end = PREFIX_LEN + header_len;
    if bytes.len() < header_end {
        return Err(Error::Truncated {
            needed: header_end as u64,
            available: bytes.len() as u64,
        });
    }
    let manifest = parse_header(&bytes[PREFIX_LEN..header_end])?;
    let needed = header_end as u64 + manifest.chunk_section_len();
    if (bytes.len() as u64) < needed {
        return Err(Error::Truncated {
            needed,
            available: bytes.len() as u64,
        });
    }
    let chunks = split_section(&manifest, &bytes[header_end..])?;
    Ok((manifest, chunks))
}
