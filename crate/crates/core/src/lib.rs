//! Hide several payload images across several cover images.
//!
//! Each payload is flattened channel-planar, split into fixed-size chunks and
//! distributed serially over the covers. Every cover carries a
//! self-delimiting segment: a JSON mapping-graph header (job counts, the
//! shape of every payload, and a directory of the chunks this cover holds)
//! followed by the raw chunk bytes, written into the low `k` bits of the
//! cover's channel bytes. Any subset of stego images can be read in any
//! order; chunks are pooled by payload and graph position and reshaped back
//! into the original rasters.
//!
//! ```
//! use stegograph::{decode, encode, BitsPerSlot, RgbImage, TransformSpec};
//!
//! let payload = RgbImage::from_fn(16, 16, |x, y| [x as u8, y as u8, 7]).unwrap();
//! let covers: Vec<RgbImage> = (0..2)
//!     .map(|i| RgbImage::from_fn(32, 32, |x, y| [(x * y + i) as u8, 90, 200]).unwrap())
//!     .collect();
//! let k = BitsPerSlot::TWO;
//! let encoded = encode(&[payload.clone()], &covers, 512, k, &TransformSpec::Identity).unwrap();
//! let decoded = decode(&encoded.stegos, k, &TransformSpec::Identity).unwrap();
//! assert_eq!(decoded.payloads, vec![payload]);
//! ```

pub mod chunking;
pub mod error;
pub mod image;
pub mod lsb;
pub mod manifest;
pub mod pipeline;
pub mod steganalysis;
pub mod transform;

pub use chunking::{merge_chunks, split_chunks, Chunk, DEFAULT_CHUNK_SIZE};
pub use error::{Error, PayloadGap, Result};
pub use image::{flatten, reshape, FlatChannels, RgbImage};
pub use lsb::{capacity_bits, embed, extract, slot_count, BitCursor, BitsPerSlot};
pub use manifest::{
    parse_segment, segment_overhead, serialize_segment, ChunkDirectoryEntry, CoverManifest,
    PayloadMetadata,
};
pub use pipeline::{
    decode, encode, plan, plan_capacities, prepare_payloads, read_segment, CapacityPlan, CoverPlan,
    DecodeWarning, Decoded, Encoded, PreparedPayload,
};
pub use steganalysis::{
    comb_score, compare, histogram, ChannelHistogram, CombReport, CompareReport,
};
pub use transform::{apply_transform, TransformSpec};
