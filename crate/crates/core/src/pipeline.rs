//! Encode and decode orchestration.
//!
//! Encoding flattens each payload, applies the transform, splits it into
//! chunks and fills the covers serially in the order given: each cover takes
//! chunks (payload order, then graph position) for as long as its whole
//! segment, header included, still fits. Every cover gets a segment, so a
//! cover that ends up carrying nothing still identifies itself.
//!
//! Decoding reads each image's segment independently, pools chunks by
//! payload, merges and reshapes. The result depends only on the set of
//! images, never on their order.

use crate::chunking::{merge_chunks, split_chunks, Chunk};
use crate::error::{Error, PayloadGap, Result};
use crate::image::{flatten, reshape, RgbImage};
use crate::lsb::{capacity_bits, embed, BitCursor, BitsPerSlot};
use crate::manifest::{
    chunk_checksum, parse_header, parse_prefix, segment_overhead, serialize_segment, split_section,
    ChunkDirectoryEntry, CoverManifest, PayloadMetadata, PREFIX_LEN,
};
use crate::transform::{apply_in_place, TransformSpec};

/// A payload ready for distribution: metadata plus transformed chunks.
#[derive(Debug, Clone)]
pub struct PreparedPayload {
    pub metadata: PayloadMetadata,
    pub chunks: Vec<Chunk>,
    checksums: Vec<u16>,
}

impl PreparedPayload {
    pub fn new(
        payload_id: u32,
        image: &RgbImage,
        chunk_size: usize,
        transform: &TransformSpec,
    ) -> Result<Self> {
        let chunk_size_u32 = u32::try_from(chunk_size).map_err(|_| Error::InvalidChunkSize)?;
        let mut flat = flatten(image).bytes;
        apply_in_place(&mut flat, transform)?;
        let chunks = split_chunks(&flat, chunk_size, payload_id)?;
        let checksums = chunks.iter().map(|c| chunk_checksum(&c.data)).collect();
        Ok(Self {
            metadata: PayloadMetadata::new(
                payload_id,
                image.width(),
                image.height(),
                chunk_size_u32,
            ),
            chunks,
            checksums,
        })
    }
}

/// Transforms and chunks every payload; ids follow argument order.
pub fn prepare_payloads(
    payloads: &[RgbImage],
    chunk_size: usize,
    transform: &TransformSpec,
) -> Result<Vec<PreparedPayload>> {
    if payloads.is_empty() {
        return Err(Error::NoPayloads);
    }
    payloads
        .iter()
        .enumerate()
        .map(|(i, img)| PreparedPayload::new(i as u32, img, chunk_size, transform))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkRef {
    pub payload_id: u32,
    pub graph_position: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverPlan {
    pub cover_index: u32,
    pub capacity_bits: u64,
    /// Chunks carried by this cover, in chunk-section order.
    pub chunks: Vec<ChunkRef>,
    pub payload_bytes: u64,
    pub segment_bytes: u64,
}

impl CoverPlan {
    pub fn overhead_bytes(&self) -> u64 {
        self.segment_bytes - self.payload_bytes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityPlan {
    pub bits_per_slot: BitsPerSlot,
    pub covers: Vec<CoverPlan>,
    pub total_capacity_bits: u64,
    pub total_payload_bytes: u64,
    pub total_overhead_bytes: u64,
    /// Fraction of total capacity taken by all segments.
    pub utilization: f64,
}

impl CapacityPlan {
    pub fn total_segment_bytes(&self) -> u64 {
        self.total_payload_bytes + self.total_overhead_bytes
    }

    /// Non-payload bytes relative to payload bytes.
    pub fn overhead_fraction(&self) -> f64 {
        self.total_overhead_bytes as f64 / self.total_payload_bytes as f64
    }

    /// Slots actually written (`segment bits / k`, rounded up per cover).
    pub fn used_slots(&self) -> u64 {
        let k = self.bits_per_slot.get() as u64;
        self.covers
            .iter()
            .map(|c| (c.segment_bytes * 8).div_ceil(k))
            .sum()
    }
}

pub fn plan(
    covers: &[RgbImage],
    payloads: &[PreparedPayload],
    k: BitsPerSlot,
) -> Result<CapacityPlan> {
    let capacities: Vec<u64> = covers.iter().map(|c| capacity_bits(c, k)).collect();
    plan_capacities(&capacities, payloads, k)
}

/// Greedy serial fill over covers with the given capacities in bits.
///
/// The header grows with every chunk a cover carries, so each candidate is
/// sized by the exact length of its directory entry before it is accepted.
pub fn plan_capacities(
    capacities: &[u64],
    payloads: &[PreparedPayload],
    k: BitsPerSlot,
) -> Result<CapacityPlan> {
    if capacities.is_empty() {
        return Err(Error::NoCovers);
    }
    if payloads.is_empty() {
        return Err(Error::NoPayloads);
    }
    let metas: Vec<PayloadMetadata> = payloads.iter().map(|p| p.metadata.clone()).collect();
    let mut queue = payloads
        .iter()
        .flat_map(|p| p.chunks.iter().zip(p.checksums.iter().copied()))
        .peekable();

    let mut covers = Vec::with_capacity(capacities.len());
    for (index, &capacity) in capacities.iter().enumerate() {
        let base = CoverManifest {
            num_payload_images: metas.len() as u32,
            num_cover_images: capacities.len() as u32,
            cover_index: index as u32,
            payloads: metas.clone(),
            directory: Vec::new(),
        };
        let mut segment = segment_overhead(&base) as u64;
        if segment * 8 > capacity {
            return Err(Error::InsufficientCapacity {
                required_bits: segment * 8,
                available_bits: capacity,
            });
        }
        let mut section = 0u64;
        let mut carried = Vec::new();
        while let Some(&(chunk, checksum)) = queue.peek() {
            let entry = ChunkDirectoryEntry {
                payload_id: chunk.payload_id,
                graph_position: chunk.graph_position,
                offset: section,
                length: chunk.data.len() as u32,
                checksum,
            };
            let separator = u64::from(!carried.is_empty());
            let grown = segment + separator + entry.json_len() as u64 + chunk.data.len() as u64;
            if grown * 8 > capacity {
                break;
            }
            segment = grown;
            section += chunk.data.len() as u64;
            carried.push(ChunkRef {
                payload_id: chunk.payload_id,
                graph_position: chunk.graph_position,
            });
            queue.next();
        }
        covers.push(CoverPlan {
            cover_index: index as u32,
            capacity_bits: capacity,
            chunks: carried,
            payload_bytes: section,
            segment_bytes: segment,
        });
    }

    let total_capacity_bits: u64 = capacities.iter().sum();
    if queue.peek().is_some() {
        // lower bound: what was placed plus the leftover chunks with minimal entries
        let placed: u64 = covers.iter().map(|c| c.segment_bytes).sum();
        let leftover: u64 = queue
            .map(|(chunk, checksum)| {
                let entry = ChunkDirectoryEntry {
                    payload_id: chunk.payload_id,
                    graph_position: chunk.graph_position,
                    offset: 0,
                    length: chunk.data.len() as u32,
                    checksum,
                };
                chunk.data.len() as u64 + entry.json_len() as u64 + 1
            })
            .sum();
        return Err(Error::InsufficientCapacity {
            required_bits: (placed + leftover) * 8,
            available_bits: total_capacity_bits,
        });
    }

    let total_payload_bytes: u64 = covers.iter().map(|c| c.payload_bytes).sum();
    let total_segment_bytes: u64 = covers.iter().map(|c| c.segment_bytes).sum();
    Ok(CapacityPlan {
        bits_per_slot: k,
        covers,
        total_capacity_bits,
        total_payload_bytes,
        total_overhead_bytes: total_segment_bytes - total_payload_bytes,
        utilization: (total_segment_bytes * 8) as f64 / total_capacity_bits as f64,
    })
}

/// Stego images (one per cover, same order) and the plan that produced them.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub stegos: Vec<RgbImage>,
    pub plan: CapacityPlan,
}

pub fn encode(
    payloads: &[RgbImage],
    covers: &[RgbImage],
    chunk_size: usize,
    k: BitsPerSlot,
    transform: &TransformSpec,
) -> Result<Encoded> {
    transform.validate()?;
    if covers.is_empty() {
        return Err(Error::NoCovers);
    }
    let prepared = prepare_payloads(payloads, chunk_size, transform)?;
    let plan = plan(covers, &prepared, k)?;
    let metas: Vec<PayloadMetadata> = prepared.iter().map(|p| p.metadata.clone()).collect();

    let stegos = covers
        .iter()
        .zip(&plan.covers)
        .map(|(cover, cover_plan)| {
            let chunks: Vec<Chunk> = cover_plan
                .chunks
                .iter()
                .map(|r| prepared[r.payload_id as usize].chunks[r.graph_position as usize].clone())
                .collect();
            let manifest = CoverManifest {
                num_payload_images: metas.len() as u32,
                num_cover_images: covers.len() as u32,
                cover_index: cover_plan.cover_index,
                payloads: metas.clone(),
                directory: ChunkDirectoryEntry::for_chunks(&chunks),
            };
            let segment = serialize_segment(&manifest, &chunks)?;
            debug_assert_eq!(segment.len() as u64, cover_plan.segment_bytes);
            embed(cover, &segment, k)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Encoded { stegos, plan })
}

/// A parsed segment read out of one stego image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub manifest: CoverManifest,
    pub chunks: Vec<Chunk>,
}

/// Streams the segment out of an image's LSBs: prefix, header, then exactly
/// the chunk bytes the header announces.
pub fn read_segment(image: &RgbImage, k: BitsPerSlot) -> Result<Segment> {
    let mut cursor = BitCursor::new(image, k);
    let capacity_bytes = cursor.remaining_bits() / 8;
    let prefix_len = (PREFIX_LEN as u64).min(capacity_bytes) as usize;
    let prefix = cursor.read_bytes(prefix_len)?;
    let header_len = parse_prefix(&prefix)? as u64;

    let truncated = |needed: u64| Error::Truncated {
        needed,
        available: capacity_bytes,
    };
    if header_len * 8 > cursor.remaining_bits() {
        return Err(truncated(PREFIX_LEN as u64 + header_len));
    }
    let header = cursor.read_bytes(header_len as usize)?;
    let manifest = parse_header(&header)?;

    let section_len = manifest.chunk_section_len();
    if section_len * 8 > cursor.remaining_bits() {
        return Err(truncated(PREFIX_LEN as u64 + header_len + section_len));
    }
    let section = cursor.read_bytes(section_len as usize)?;
    let chunks = split_section(&manifest, &section)?;
    Ok(Segment { manifest, chunks })
}

/// An input image that was skipped because it carries no segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeWarning {
    pub input_index: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Decoded {
    /// Recovered payloads ordered by payload id.
    pub payloads: Vec<RgbImage>,
    pub warnings: Vec<DecodeWarning>,
    /// Cover indices found among the inputs, ascending.
    pub covers_seen: Vec<u32>,
    pub num_cover_images: u32,
}

pub fn decode(stegos: &[RgbImage], k: BitsPerSlot, transform: &TransformSpec) -> Result<Decoded> {
    transform.validate()?;
    let mut segments: Vec<(usize, Segment)> = Vec::new();
    let mut warnings = Vec::new();
    for (i, image) in stegos.iter().enumerate() {
        match read_segment(image, k) {
            Ok(segment) => segments.push((i, segment)),
            Err(Error::NotStego) => warnings.push(DecodeWarning {
                input_index: i,
                message: "no stego segment found; skipped".into(),
            }),
            Err(e) => return Err(e),
        }
    }
    let Some((first_index, first)) = segments.first() else {
        return Err(Error::NoStegoFound(stegos.len()));
    };
    let reference = &first.manifest;

    for (i, segment) in &segments[1..] {
        let m = &segment.manifest;
        if m.num_payload_images != reference.num_payload_images
            || m.num_cover_images != reference.num_cover_images
            || m.payloads != reference.payloads
        {
            return Err(Error::Corruption(format!(
                "inputs {first_index} and {i} disagree on job metadata"
            )));
        }
    }
    // the same cover passed twice is fine; two different segments claiming one index are not
    let mut by_cover: Vec<(u32, usize)> = segments
        .iter()
        .enumerate()
        .map(|(s, (_, seg))| (seg.manifest.cover_index, s))
        .collect();
    by_cover.sort_unstable();
    for pair in by_cover.windows(2) {
        let (a, b) = (&segments[pair[0].1], &segments[pair[1].1]);
        if pair[0].0 == pair[1].0 && a.1 != b.1 {
            return Err(Error::Corruption(format!(
                "inputs {} and {} both claim cover index {} with different contents",
                a.0, b.0, pair[0].0
            )));
        }
    }
    let mut covers_seen: Vec<u32> = by_cover.iter().map(|&(c, _)| c).collect();
    covers_seen.dedup();

    let metas = reference.payloads.clone();
    let num_cover_images = reference.num_cover_images;
    let mut pools: Vec<Vec<Chunk>> = vec![Vec::new(); metas.len()];
    for (_, segment) in segments {
        for chunk in segment.chunks {
            pools[chunk.payload_id as usize].push(chunk);
        }
    }

    let mut merged = Vec::with_capacity(metas.len());
    let mut gaps = Vec::new();
    for (meta, pool) in metas.iter().zip(pools) {
        match merge_chunks(meta.payload_id, pool, meta.chunk_count) {
            Ok(bytes) => merged.push(bytes),
            Err(Error::IncompletePayload {
                payload_id,
                missing,
            }) => gaps.push(PayloadGap {
                payload_id,
                missing,
            }),
            Err(e) => return Err(e),
        }
    }
    if !gaps.is_empty() {
        return Err(Error::IncompleteSet {
            expected_covers: num_cover_images,
            seen_covers: covers_seen,
            gaps,
        });
    }

    let payloads = metas
        .iter()
        .zip(merged)
        .map(|(meta, mut bytes)| {
            apply_in_place(&mut bytes, transform)?;
            reshape(&bytes, meta.width, meta.height)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Decoded {
        payloads,
        warnings,
        covers_seen,
        num_cover_images,
    })
}
