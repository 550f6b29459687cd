//! Fixed-size chunking of flat payload bytes and order-independent merging.

use crate::error::{Error, Result};

/// Default chunk size in bytes.
pub const DEFAULT_CHUNK_SIZE: usize = 512;

/// One unit of distribution: a slice of a payload's flat bytes, addressed by
/// the payload it belongs to and its 0-based position in that payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub payload_id: u32,
    pub graph_position: u32,
    pub data: Vec<u8>,
}

/// Splits `bytes` into `ceil(len / chunk_size)` chunks. Only the last chunk
/// may be short; it is never padded.
pub fn split_chunks(bytes: &[u8], chunk_size: usize, payload_id: u32) -> Result<Vec<Chunk>> {
    if chunk_size == 0 {
        return Err(Error::InvalidChunkSize);
    }
    if bytes.is_empty() {
        return Err(Error::EmptyPayload { payload_id });
    }
    Ok(bytes
        .chunks(chunk_size)
        .enumerate()
        .map(|(i, data)| Chunk {
            payload_id,
            graph_position: i as u32,
            data: data.to_vec(),
        })
        .collect())
}

/// Reassembles one payload from chunks in any order.
///
/// Identical duplicates are tolerated (the same chunk seen twice); a
/// duplicate position with different bytes is corruption.
pub fn merge_chunks(
    payload_id: u32,
    mut chunks: Vec<Chunk>,
    expected_count: u32,
) -> Result<Vec<u8>> {
    if let Some(stray) = chunks.iter().find(|c| c.payload_id != payload_id) {
        return Err(Error::Corruption(format!(
            "chunk of payload {} pooled with payload {payload_id}",
            stray.payload_id
        )));
    }
    if let Some(c) = chunks.iter().find(|c| c.graph_position >= expected_count) {
        return Err(Error::Corruption(format!(
            "payload {payload_id}: graph position {} out of range (chunk count {expected_count})",
            c.graph_position
        )));
    }
    chunks.sort_by_key(|c| c.graph_position);
    chunks.dedup_by(|later, earlier| {
        later.graph_position == earlier.graph_position && later.data == earlier.data
    });
    if let Some(pair) = chunks
        .windows(2)
        .find(|w| w[0].graph_position == w[1].graph_position)
    {
        return Err(Error::Corruption(format!(
            "payload {payload_id}: conflicting data for graph position {}",
            pair[0].graph_position
        )));
    }

    if chunks.len() != expected_count as usize {
        let mut present = chunks.iter().map(|c| c.graph_position).peekable();
        let mut missing = Vec::new();
        for pos in 0..expected_count {
            if present.peek() == Some(&pos) {
                present.next();
            } else {
                missing.push(pos);
            }
        }
        return Err(Error::IncompletePayload {
            payload_id,
            missing,
        });
    }

    let total = chunks.iter().map(|c| c.data.len()).sum();
    let mut out = Vec::with_capacity(total);
    for chunk in &chunks {
        out.extend_from_slice(&chunk.data);
    }
    Ok(out)
}
