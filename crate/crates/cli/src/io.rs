//! Input loading shared by the subcommands, plus atomic file writes.

use std::path::{Path, PathBuf};

use numeral_core::dataset::{self, idx, pgm, GrayImage, SampleSet};
use numeral_core::error::{Error, Result};
use numeral_core::features::extract_batch;
use numeral_core::preprocess::{normalize_set, BinaryImage32, ThresholdPolicy};

/// Load a labeled sample set: an IDX pair when `--labels` is given, otherwise
/// a directory tree with `0`..`9` subdirectories of PGM files.
pub fn load_labeled(input: &Path, labels: Option<&Path>, invert: bool) -> Result<SampleSet> {
    let mut set = match labels {
        Some(labels) => idx::load_idx(input, labels)?,
        None if input.is_dir() => dataset::load_directory(input)?,
        None => {
            return Err(Error::InvalidConfig(format!(
                "{}: labeled input must be an IDX pair (--labels) or a directory of 0..9 subdirectories",
                input.display()
            )))
        }
    };
    if invert {
        for sample in &mut set.samples {
            sample.image = sample.image.inverted();
        }
    }
    Ok(set)
}

/// Load images without labels: a single PGM file, an IDX image file
/// (detected by magic), or a directory searched recursively for `*.pgm`
/// files in lexicographic path order.
pub fn load_unlabeled(input: &Path, invert: bool) -> Result<Vec<GrayImage>> {
    let mut images = if input.is_dir() {
        let mut paths = Vec::new();
        collect_pgms(input, &mut paths)?;
        paths.sort();
        paths
            .iter()
            .map(|p| pgm::load_pgm(p))
            .collect::<Result<Vec<_>>>()?
    } else {
        let head = std::fs::read(input).map_err(|e| Error::io(input, e))?;
        if head.starts_with(&idx::IMAGE_MAGIC.to_be_bytes()) {
            idx::load_idx_images(input)?
        } else {
            vec![pgm::load_pgm(input)?]
        }
    };
    if invert {
        for img in &mut images {
            *img = img.inverted();
        }
    }
    Ok(images)
}

fn collect_pgms(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_pgms(&path, out)?;
        } else if path.extension().is_some_and(|ext| ext == "pgm") {
            out.push(path);
        }
    }
    Ok(())
}

/// Normalize and extract features for a labeled set. Samples whose glyph is
/// empty are skipped; the second element of the result counts them.
pub fn featurize(
    set: &SampleSet,
    policy: ThresholdPolicy,
) -> Result<(Vec<Vec<f64>>, Vec<usize>, usize)> {
    let normalized = normalize_set(set, policy);
    let mut imgs: Vec<BinaryImage32> = Vec::with_capacity(set.len());
    let mut labels = Vec::with_capacity(set.len());
    let mut skipped = 0usize;
    for (sample, outcome) in set.samples.iter().zip(normalized) {
        match outcome {
            Ok(img) => {
                imgs.push(img);
                labels.push(sample.label);
            }
            Err(Error::EmptyGlyph) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let features = extract_batch(&imgs)
        .into_iter()
        .map(|v| v.to_vec())
        .collect();
    Ok((features, labels, skipped))
}

/// Write a file via a temporary sibling and rename, so outputs are never
/// observed half-written and reruns produce byte-identical artifacts.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
