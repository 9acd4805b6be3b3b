//! Sample ingestion: grayscale images plus digit labels from PGM files,
//! IDX pairs, or labeled directory trees.

use std::path::Path;

use crate::error::{Error, Result};

pub mod idx;
pub mod pgm;

/// Rectangular grid of 8-bit intensities, row-major. By convention ink is
/// dark: strokes are low values on a light background. Loaders for corpora
/// with the opposite storage polarity invert at load time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if pixels.len() != width * height {
            return Err(Error::PixelCountMismatch {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Flip storage polarity (`p -> 255 - p`).
    pub fn inverted(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| 255 - p).collect(),
        }
    }
}

/// One digit sample: an image and its class in `0..=9`.
#[derive(Clone, Debug)]
pub struct LabeledSample {
    pub image: GrayImage,
    pub label: usize,
}

pub const CLASS_COUNT: usize = 10;

/// Ordered collection of labeled samples. Order is the load order and is
/// stable across runs for identical inputs.
#[derive(Clone, Debug, Default)]
pub struct SampleSet {
    pub samples: Vec<LabeledSample>,
    /// Where the set came from, for logs and reports.
    pub source: String,
    /// Files ignored during loading (e.g. entries under unrecognized
    /// subdirectories).
    pub skipped: usize,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }
}

/// Load a directory tree of PGM files where each immediate subdirectory is
/// named after the digit class it holds (`0` through `9`).
///
/// Samples are ordered lexicographically by path, so two loads of the same
/// tree produce identical sets. Files under subdirectories with any other
/// name are skipped and counted in [`SampleSet::skipped`].
pub fn load_directory(root: &Path) -> Result<SampleSet> {
    let mut entries: Vec<(std::path::PathBuf, usize)> = Vec::new();
    let mut skipped = 0usize;

    let read_dir = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in read_dir {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let name = entry.file_name();
        let label = name.to_str().and_then(|s| match s {
            "0" | "1" | "2" | "3" | "4" | "5" | "6" | "7" | "8" | "9" => {
                Some(s.parse::<usize>().unwrap())
            }
            _ => None,
        });
        let files = list_files(&path)?;
        match label {
            Some(label) => {
                for file in files {
                    if file.extension().is_some_and(|ext| ext == "pgm") {
                        entries.push((file, label));
                    }
                }
            }
            None => skipped += files.len(),
        }
    }

    entries.sort_by(|a, b| a.0.cmp(&b.0));

    let mut samples = Vec::with_capacity(entries.len());
    for (path, label) in entries {
        let image = pgm::load_pgm(&path)?;
        samples.push(LabeledSample { image, label });
    }

    Ok(SampleSet {
        samples,
        source: format!("dir:{}", root.display()),
        skipped,
    })
}

fn list_files(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    Ok(files)
}
