use std::fmt;

use thiserror::Error;

/// Everything that can go wrong while hiding or recovering payloads.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("image dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },

    #[error("shape mismatch: expected {expected} bytes, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("images differ in size: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },

    #[error("bits per slot must be 1, 2 or 3, got {0}")]
    InvalidBitsPerSlot(u8),

    #[error("chunk size must be at least 1 byte")]
    InvalidChunkSize,

    #[error("payload {payload_id} is empty")]
    EmptyPayload { payload_id: u32 },

    #[error("no payload images given")]
    NoPayloads,

    #[error("no cover images given")]
    NoCovers,

    #[error("xor-keystream transform requires a non-empty key")]
    EmptyKey,

    #[error("payload needs {required_bits} bits but the cover holds {available_bits}")]
    PayloadTooLarge {
        required_bits: u64,
        available_bits: u64,
    },

    #[error("read of {requested_bits} bits from slot {start_slot} exceeds capacity of {available_bits} bits")]
    OutOfRange {
        start_slot: u64,
        requested_bits: u64,
        available_bits: u64,
    },

    #[error("insufficient capacity: job needs at least {required_bits} bits, covers hold {available_bits}")]
    InsufficientCapacity {
        required_bits: u64,
        available_bits: u64,
    },

    #[error("directory does not match chunks: {0}")]
    Consistency(String),

    #[error("not a stego segment (magic mismatch)")]
    NotStego,

    #[error("truncated segment: need {needed} bytes, have {available}")]
    Truncated { needed: u64, available: u64 },

    #[error("corrupt manifest: {0}")]
    ManifestCorrupt(String),

    #[error("corrupt chunk data: {0}")]
    Corruption(String),

    #[error(
        "payload {payload_id} is incomplete: missing graph positions {}",
        PositionList(missing)
    )]
    IncompletePayload { payload_id: u32, missing: Vec<u32> },

    #[error("{}", IncompleteSetDisplay { expected_covers: *expected_covers, seen_covers, gaps })]
    IncompleteSet {
        expected_covers: u32,
        seen_covers: Vec<u32>,
        gaps: Vec<PayloadGap>,
    },

    #[error("none of the {0} input image(s) carries a stego segment")]
    NoStegoFound(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Graph positions missing from one payload after pooling every stego image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadGap {
    pub payload_id: u32,
    pub missing: Vec<u32>,
}

/// Formats sorted positions as compact ranges: `0-511, 700, 702-703`.
pub struct PositionList<'a>(pub &'a [u32]);

impl fmt::Display for PositionList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut iter = self.0.iter().copied().peekable();
        let mut first = true;
        while let Some(start) = iter.next() {
            let mut end = start;
            while let Some(&next) = iter.peek() {
                if next != end + 1 {
                    break;
                }
                end = next;
                iter.next();
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            if start == end {
                write!(f, "{start}")?;
            } else {
                write!(f, "{start}-{end}")?;
            }
        }
        if first {
            f.write_str("none")?;
        }
        Ok(())
    }
}

struct IncompleteSetDisplay<'a> {
    expected_covers: u32,
    seen_covers: &'a [u32],
    gaps: &'a [PayloadGap],
}

impl fmt::Display for IncompleteSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let absent: Vec<u32> = (0..self.expected_covers)
            .filter(|i| !self.seen_covers.contains(i))
            .collect();
        write!(
            f,
            "incomplete stego set: {} of {} cover(s) present (absent cover indices: {})",
            self.seen_covers.len(),
            self.expected_covers,
            PositionList(&absent)
        )?;
        for gap in self.gaps {
            write!(
                f,
                "; payload {} missing graph positions {}",
                gap.payload_id,
                PositionList(&gap.missing)
            )?;
        }
        Ok(())
    }
}
