//! The raster value model and the channel-planar flatmap.
//!
//! Covers, stego images and payloads are all [`RgbImage`]s: 8-bit, three
//! channels, stored row-major with R, G, B interleaved per pixel. Payloads
//! are flattened before chunking into a channel-planar byte sequence: every
//! red value in row-major order, then every green value, then every blue.

use crate::error::{Error, Result};

/// Number of channels per pixel. Recorded in each manifest.
pub const CHANNELS: usize = 3;

/// An 8-bit, 3-channel raster.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps an interleaved RGB buffer. Fails if either dimension is zero or
    /// the buffer length is not `width * height * 3`.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        let expected = byte_len(width, height);
        if data.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [u8; 3],
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions { width, height });
        }
        let mut data = Vec::with_capacity(byte_len(width, height));
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Interleaved channel bytes, row-major.
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub(crate) fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn same_dimensions(&self, other: &RgbImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

impl std::fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

fn byte_len(width: u32, height: u32) -> usize {
    width as usize * height as usize * CHANNELS
}

/// A payload image in channel-planar order, together with its source shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatChannels {
    pub bytes: Vec<u8>,
    pub source_width: u32,
    pub source_height: u32,
}

impl FlatChannels {
    pub fn into_image(self) -> Result<RgbImage> {
        reshape(&self.bytes, self.source_width, self.source_height)
    }
}

/// Converts an interleaved raster into R plane, G plane, B plane, each row-major.
pub fn flatten(image: &RgbImage) -> FlatChannels {
    let plane = image.pixel_count();
    let mut bytes = vec![0u8; plane * CHANNELS];
    let (red, rest) = bytes.split_at_mut(plane);
    let (green, blue) = rest.split_at_mut(plane);
    for (i, px) in image.data.chunks_exact(CHANNELS).enumerate() {
        red[i] = px[0];
        green[i] = px[1];
        blue[i] = px[2];
    }
    FlatChannels {
        bytes,
        source_width: image.width,
        source_height: image.height,
    }
}

/// Inverse of [`flatten`].
pub fn reshape(flat: &[u8], width: u32, height: u32) -> Result<RgbImage> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    let expected = byte_len(width, height);
    if flat.len() != expected {
        return Err(Error::Shape {
            expected,
            actual: flat.len(),
        });
    }
    let plane = expected / CHANNELS;
    let (red, rest) = flat.split_at(plane);
    let (green, blue) = rest.split_at(plane);
    let mut data = Vec::with_capacity(expected);
    for i in 0..plane {
        data.extend_from_slice(&[red[i], green[i], blue[i]]);
    }
    Ok(RgbImage {
        width,
        height,
        data,
    })
}
