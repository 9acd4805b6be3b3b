//! Synthetic handwritten-digit corpus rendered from jittered seven-segment
//! strokes, exported as an IDX image/label pair.
//!
//! The build environment has no network access, so benchmarks that call for
//! a public 28x28 digit corpus fall back to this generator. Samples vary in
//! scale, position, stroke width, and per-endpoint jitter; images are stored
//! ink-high like the public IDX corpora (loaders invert to dark-ink). The
//! IDX bytes are assembled by hand here, independent of the production
//! parser.

use std::path::{Path, PathBuf};

use numeral_core::dataset::GrayImage;
use numeral_core::rng::XorShiftRng;

pub const SIDE: usize = 28;

// Segment endpoints in a unit box, y growing downward:
// A top, B upper-right, C lower-right, D bottom, E lower-left, F upper-left,
// G middle.
const SEGMENTS: [((f64, f64), (f64, f64)); 7] = [
    ((0.15, 0.08), (0.85, 0.08)), // A
    ((0.85, 0.08), (0.85, 0.50)), // B
    ((0.85, 0.50), (0.85, 0.92)), // C
    ((0.15, 0.92), (0.85, 0.92)), // D
    ((0.15, 0.50), (0.15, 0.92)), // E
    ((0.15, 0.08), (0.15, 0.50)), // F
    ((0.15, 0.50), (0.85, 0.50)), // G
];

const DIGIT_SEGMENTS: [&[usize]; 10] = [
    &[0, 1, 2, 3, 4, 5],    // 0
    &[1, 2],                // 1
    &[0, 1, 6, 4, 3],       // 2
    &[0, 1, 6, 2, 3],       // 3
    &[5, 6, 1, 2],          // 4
    &[0, 5, 6, 2, 3],       // 5
    &[0, 5, 6, 4, 3, 2],    // 6
    &[0, 1, 2],             // 7
    &[0, 1, 2, 3, 4, 5, 6], // 8
    &[0, 1, 2, 3, 5, 6],    // 9
];

/// Render one jittered digit. Pixels are in IDX storage polarity: ink is
/// high, background low.
pub fn render_digit(digit: usize, rng: &mut XorShiftRng) -> GrayImage {
    assert!(digit < 10);
    let scale = (0.72 + 0.22 * rng.next_f64()) * SIDE as f64;
    let off_x = 1.5 + (SIDE as f64 - scale - 3.0).max(0.0) * rng.next_f64();
    let off_y = 1.5 + (SIDE as f64 - scale - 3.0).max(0.0) * rng.next_f64();
    let half_width = 0.7 + 0.7 * rng.next_f64();
    let ink_level = 190 + rng.below(66) as u8;

    let strokes: Vec<((f64, f64), (f64, f64))> = DIGIT_SEGMENTS[digit]
        .iter()
        .map(|&si| {
            let (a, b) = SEGMENTS[si];
            let jitter = |rng: &mut XorShiftRng| 0.05 * (rng.next_f64() - 0.5);
            let place = |p: (f64, f64), jx: f64, jy: f64| {
                (off_x + (p.0 + jx) * scale, off_y + (p.1 + jy) * scale)
            };
            let (jax, jay, jbx, jby) = (jitter(rng), jitter(rng), jitter(rng), jitter(rng));
            (place(a, jax, jay), place(b, jbx, jby))
        })
        .collect();

    GrayImage::from_fn(SIDE, SIDE, |x, y| {
        let p = (x as f64 + 0.5, y as f64 + 0.5);
        let dist = strokes
            .iter()
            .map(|&(a, b)| segment_distance(p, a, b))
            .fold(f64::MAX, f64::min);
        if dist <= half_width {
            ink_level
        } else if dist <= half_width + 1.0 {
            // soft edge so thresholding sees gray transitions
            (ink_level as f64 * (half_width + 1.0 - dist)) as u8
        } else {
            0
        }
    })
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let qx = a.0 + t * dx;
    let qy = a.1 + t * dy;
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

pub struct SyntheticCorpus {
    pub images_path: PathBuf,
    pub labels_path: PathBuf,
    pub count: usize,
}

/// Write `per_class * 10` rendered digits as an IDX pair under `dir`.
/// Classes are interleaved (0,1,...,9,0,1,...), everything derived from
/// `seed`.
pub fn write_synthetic_idx(
    dir: &Path,
    per_class: usize,
    seed: u64,
) -> std::io::Result<SyntheticCorpus> {
    let mut rng = XorShiftRng::new(seed);
    let count = per_class * 10;

    let mut image_bytes = Vec::with_capacity(16 + count * SIDE * SIDE);
    image_bytes.extend_from_slice(&0x0000_0803u32.to_be_bytes());
    image_bytes.extend_from_slice(&(count as u32).to_be_bytes());
    image_bytes.extend_from_slice(&(SIDE as u32).to_be_bytes());
    image_bytes.extend_from_slice(&(SIDE as u32).to_be_bytes());

    let mut label_bytes = Vec::with_capacity(8 + count);
    label_bytes.extend_from_slice(&0x0000_0801u32.to_be_bytes());
    label_bytes.extend_from_slice(&(count as u32).to_be_bytes());

    for i in 0..count {
        let digit = i % 10;
        let img = render_digit(digit, &mut rng);
        image_bytes.extend_from_slice(img.pixels());
        label_bytes.push(digit as u8);
    }

    let images_path = dir.join("synthetic-images.idx");
    let labels_path = dir.join("synthetic-labels.idx");
    std::fs::write(&images_path, image_bytes)?;
    std::fs::write(&labels_path, label_bytes)?;
    Ok(SyntheticCorpus {
        images_path,
        labels_path,
        count,
    })
}
