//! Lossless image file I/O.
//!
//! Only PNG (and BMP, read-only) are accepted: LSB payloads do not survive
//! lossy storage. Inputs must be 8-bit RGB without alpha.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat, ImageReader};
use stegograph::RgbImage;
use tempfile::NamedTempFile;

use crate::error::CliError;

pub fn load_image(path: &Path) -> Result<RgbImage, CliError> {
    let reader = ImageReader::open(path)
        .and_then(|r| r.with_guessed_format())
        .map_err(|e| CliError::input(path, e.to_string()))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Bmp) => {}
        Some(other) => {
            return Err(CliError::input(
                path,
                format!("{other:?} is not supported; use lossless PNG"),
            ))
        }
        None => return Err(CliError::input(path, "unrecognized image format")),
    }
    let decoded = reader
        .decode()
        .map_err(|e| CliError::input(path, e.to_string()))?;
    match decoded {
        DynamicImage::ImageRgb8(buf) => {
            let (w, h) = buf.dimensions();
            Ok(RgbImage::new(w, h, buf.into_raw())?)
        }
        other => Err(CliError::input(
            path,
            format!(
                "expected 8-bit RGB without alpha, found {:?}",
                other.color()
            ),
        )),
    }
}

pub fn encode_png(
    image: &RgbImage,
    w: impl std::io::Write + std::io::Seek,
) -> Result<(), image::ImageError> {
    let buf = image::RgbImage::from_raw(image.width(), image.height(), image.as_bytes().to_vec())
        .expect("RgbImage buffer length is validated");
    let mut w = BufWriter::new(w);
    buf.write_to(&mut w, ImageFormat::Png)
}

/// Outputs written to temporary files first and moved into place together,
/// so a failing command leaves nothing behind.
pub struct StagedOutputs {
    dir: PathBuf,
    overwrite: bool,
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl StagedOutputs {
    pub fn new(dir: &Path, overwrite: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            overwrite,
            staged: Vec::new(),
        })
    }

    /// Fails early when the target exists and overwriting is off, or when
    /// two outputs of one command would collide.
    pub fn reserve(&self, name: &str) -> Result<PathBuf, CliError> {
        let target = self.dir.join(name);
        if self.staged.iter().any(|(_, t)| *t == target) {
            return Err(CliError::Usage(format!(
                "two outputs would both be written to {}",
                target.display()
            )));
        }
        if !self.overwrite && target.exists() {
            return Err(CliError::input(
                &target,
                "already exists (pass --overwrite)",
            ));
        }
        Ok(target)
    }

    pub fn add_png(&mut self, name: &str, image: &RgbImage) -> Result<PathBuf, CliError> {
        self.add_with(name, |file| {
            encode_png(image, file).map_err(std::io::Error::other)
        })
    }

    pub fn add_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        self.add_with(name, |file| std::io::Write::write_all(file, bytes))
    }

    fn add_with(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut fs::File) -> std::io::Result<()>,
    ) -> Result<PathBuf, CliError> {
        let target = self.reserve(name)?;
        let io_err = |source| CliError::Io {
            path: target.clone(),
            source,
        };
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        write(tmp.as_file_mut()).map_err(io_err)?;
        self.staged.push((tmp, target.clone()));
        Ok(target)
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::with_capacity(self.staged.len());
        for (tmp, target) in self.staged {
            let result = if self.overwrite {
                tmp.persist(&target).map(|_| ())
            } else {
                tmp.persist_noclobber(&target).map(|_| ())
            };
            result.map_err(|e| CliError::Io {
                path: target.clone(),
                source: e.error,
            })?;
            written.push(target);
        }
        Ok(written)
    }
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}
