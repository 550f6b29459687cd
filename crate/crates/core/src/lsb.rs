//! k-bit LSB insertion into the channel bytes of a cover image.
//!
//! A *slot* is one channel byte. Slots are visited in the cover's own buffer
//! order: row-major pixels, R, G, B within each pixel. Payload bytes are
//! consumed MSB-first, `k` bits per slot, and the first bit consumed lands in
//! the highest of the `k` low positions. Slots past the end of the payload are
//! never touched.

use crate::error::{Error, Result};
use crate::image::RgbImage;

/// Number of low-order bits replaced per slot (1, 2 or 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitsPerSlot(u8);

impl BitsPerSlot {
    pub const ONE: Self = Self(1);
    pub const TWO: Self = Self(2);
    pub const THREE: Self = Self(3);

    pub fn new(k: u8) -> Result<Self> {
        match k {
            1..=3 => Ok(Self(k)),
            _ => Err(Error::InvalidBitsPerSlot(k)),
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    fn mask(self) -> u8 {
        (1u8 << self.0) - 1
    }

    /// Largest change embedding can make to a single channel value.
    pub fn max_delta(self) -> u8 {
        self.mask()
    }

    pub fn all() -> [Self; 3] {
        [Self::ONE, Self::TWO, Self::THREE]
    }
}

impl Default for BitsPerSlot {
    fn default() -> Self {
        Self::TWO
    }
}

impl TryFrom<u8> for BitsPerSlot {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Self::new(k)
    }
}

pub fn slot_count(image: &RgbImage) -> u64 {
    image.as_bytes().len() as u64
}

pub fn capacity_bits(image: &RgbImage, k: BitsPerSlot) -> u64 {
    slot_count(image) * k.get() as u64
}

/// Returns a copy of `cover` with `payload` written from slot 0.
pub fn embed(cover: &RgbImage, payload: &[u8], k: BitsPerSlot) -> Result<RgbImage> {
    let mut stego = cover.clone();
    embed_in_place(&mut stego, payload, k)?;
    Ok(stego)
}

pub fn embed_in_place(cover: &mut RgbImage, payload: &[u8], k: BitsPerSlot) -> Result<()> {
    let available_bits = capacity_bits(cover, k);
    let required_bits = payload.len() as u64 * 8;
    if required_bits > available_bits {
        return Err(Error::PayloadTooLarge {
            required_bits,
            available_bits,
        });
    }
    let mut writer = SlotWriter::new(cover.as_bytes_mut(), k);
    writer.write(payload);
    writer.finish();
    Ok(())
}

/// Reads `byte_count` bytes starting at `start_slot`. Reads
/// `ceil(byte_count * 8 / k)` whole slots; surplus bits of the final slot
/// are discarded.
pub fn extract(
    stego: &RgbImage,
    byte_count: usize,
    start_slot: u64,
    k: BitsPerSlot,
) -> Result<Vec<u8>> {
    let mut cursor = BitCursor::at_slot(stego, start_slot, k)?;
    cursor.read_bytes(byte_count)
}

/// Sequential bit reader over the slots of an image.
///
/// Unlike [`extract`] it keeps sub-slot position between reads, so a segment
/// can be parsed piecewise (prefix, then header, then chunk section) at any
/// `k` without losing the bits that straddle a read boundary.
pub struct BitCursor<'a> {
    slots: &'a [u8],
    slot_index: usize,
    k: BitsPerSlot,
    acc: u32,
    acc_bits: u32,
}

impl<'a> BitCursor<'a> {
    pub fn new(image: &'a RgbImage, k: BitsPerSlot) -> Self {
        Self {
            slots: image.as_bytes(),
            slot_index: 0,
            k,
            acc: 0,
            acc_bits: 0,
        }
    }

    pub fn at_slot(image: &'a RgbImage, start_slot: u64, k: BitsPerSlot) -> Result<Self> {
        let total = slot_count(image);
        if start_slot > total {
            return Err(Error::OutOfRange {
                start_slot,
                requested_bits: 0,
                available_bits: total * k.get() as u64,
            });
        }
        let mut cursor = Self::new(image, k);
        cursor.slot_index = start_slot as usize;
        Ok(cursor)
    }

    /// Index of the next slot that has not been consumed.
    pub fn slot_index(&self) -> u64 {
        self.slot_index as u64
    }

    pub fn remaining_bits(&self) -> u64 {
        (self.slots.len() - self.slot_index) as u64 * self.k.get() as u64 + self.acc_bits as u64
    }

    pub fn read_bytes(&mut self, byte_count: usize) -> Result<Vec<u8>> {
        let requested_bits = byte_count as u64 * 8;
        if requested_bits > self.remaining_bits() {
            return Err(Error::OutOfRange {
                start_slot: self.slot_index as u64,
                requested_bits,
                available_bits: self.remaining_bits(),
            });
        }
        let k = self.k.get() as u32;
        let mask = self.k.mask() as u32;
        let mut out = Vec::with_capacity(byte_count);
        for _ in 0..byte_count {
            while self.acc_bits < 8 {
                let v = self.slots[self.slot_index] as u32 & mask;
                self.slot_index += 1;
                self.acc = (self.acc << k) | v;
                self.acc_bits += k;
            }
            self.acc_bits -= 8;
            out.push((self.acc >> self.acc_bits) as u8);
            self.acc &= (1 << self.acc_bits) - 1;
        }
        Ok(out)
    }
}

/// Sequential bit writer; the counterpart of [`BitCursor`].
pub struct SlotWriter<'a> {
    slots: &'a mut [u8],
    slot_index: usize,
    k: BitsPerSlot,
    acc: u32,
    acc_bits: u32,
}

impl<'a> SlotWriter<'a> {
    pub fn new(slots: &'a mut [u8], k: BitsPerSlot) -> Self {
        Self {
            slots,
            slot_index: 0,
            k,
            acc: 0,
            acc_bits: 0,
        }
    }

    /// Panics if the bytes do not fit; callers check capacity first.
    pub fn write(&mut self, bytes: &[u8]) {
        let k = self.k.get() as u32;
        let mask = self.k.mask();
        for &b in bytes {
            self.acc = (self.acc << 8) | b as u32;
            self.acc_bits += 8;
            while self.acc_bits >= k {
                self.acc_bits -= k;
                let v = (self.acc >> self.acc_bits) as u8 & mask;
                let slot = &mut self.slots[self.slot_index];
                *slot = (*slot & !mask) | v;
                self.slot_index += 1;
            }
            self.acc &= (1 << self.acc_bits) - 1;
        }
    }

    /// Flushes a partial final group into the high end of the next slot's
    /// k-bit field; the rest of that field keeps its cover bits.
    pub fn finish(mut self) -> u64 {
        if self.acc_bits > 0 {
            let shift = self.k.get() as u32 - self.acc_bits;
            let field = ((1u8 << self.acc_bits) - 1) << shift;
            let v = (self.acc as u8) << shift;
            let slot = &mut self.slots[self.slot_index];
            *slot = (*slot & !field) | v;
            self.slot_index += 1;
            self.acc_bits = 0;
        }
        self.slot_index as u64
    }
}
