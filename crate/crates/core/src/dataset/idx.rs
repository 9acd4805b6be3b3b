//! IDX loader for MNIST-style digit corpora.
//!
//! Big-endian headers; images use magic `0x00000803` (u8 payload, dimensions
//! count x rows x cols), labels use `0x00000801`. Digit corpora in this format
//! store ink as high values, so images are inverted on load to the crate's
//! dark-ink convention.

use std::path::Path;

use crate::dataset::{GrayImage, LabeledSample, SampleSet, CLASS_COUNT};
use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Load an image/label pair into a [`SampleSet`].
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<SampleSet> {
    let images = load_idx_images(images_path)?;
    let label_bytes = std::fs::read(labels_path).map_err(|e| Error::io(labels_path, e))?;
    let labels = parse_labels(&label_bytes, labels_path)?;

    if images.len() != labels.len() {
        return Err(Error::IdxCountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }

    let samples = images
        .into_iter()
        .zip(labels)
        .map(|(image, label)| LabeledSample { image, label })
        .collect();

    Ok(SampleSet {
        samples,
        source: format!("idx:{}", images_path.display()),
        skipped: 0,
    })
}

/// Load just the image file (used by commands that do not need labels).
/// Returned images are already inverted to dark-ink polarity.
pub fn load_idx_images(path: &Path) -> Result<Vec<GrayImage>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_images(&bytes, path)
}

fn parse_images(bytes: &[u8], path: &Path) -> Result<Vec<GrayImage>> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::IdxMagic {
            path: path.to_path_buf(),
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let rows = be_u32(bytes, 8, path)? as usize;
    let cols = be_u32(bytes, 12, path)? as usize;
    if count > 0 && (rows == 0 || cols == 0) {
        return Err(Error::EmptyImage {
            width: cols,
            height: rows,
        });
    }

    let expected = rows
        .checked_mul(cols)
        .and_then(|px| px.checked_mul(count))
        .and_then(|total| total.checked_add(16))
        .ok_or_else(|| Error::IdxTruncated {
            path: path.to_path_buf(),
            expected: usize::MAX,
            found: bytes.len(),
        })?;
    if bytes.len() < expected {
        return Err(Error::IdxTruncated {
            path: path.to_path_buf(),
            expected,
            found: bytes.len(),
        });
    }

    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let start = 16 + i * rows * cols;
        let pixels = bytes[start..start + rows * cols]
            .iter()
            .map(|&p| 255 - p)
            .collect();
        images.push(GrayImage::new(cols, rows, pixels)?);
    }
    Ok(images)
}

fn parse_labels(bytes: &[u8], path: &Path) -> Result<Vec<usize>> {
    let magic = be_u32(bytes, 0, path)?;
    if magic != LABEL_MAGIC {
        return Err(Error::IdxMagic {
            path: path.to_path_buf(),
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4, path)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(Error::IdxTruncated {
            path: path.to_path_buf(),
            expected,
            found: bytes.len(),
        });
    }
    bytes[8..8 + count]
        .iter()
        .map(|&b| {
            let label = b as usize;
            if label >= CLASS_COUNT {
                Err(Error::InvalidLabel {
                    label,
                    classes: CLASS_COUNT,
                })
            } else {
                Ok(label)
            }
        })
        .collect()
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::IdxTruncated {
            path: path.to_path_buf(),
            expected: offset + 4,
            found: bytes.len(),
        })
}
