//! Deterministic random image generators for property and acceptance tests.

use numeral_core::dataset::GrayImage;
use numeral_core::preprocess::BinaryImage32;
use numeral_core::rng::XorShiftRng;

/// Random 32x32 binary image with roughly `fill_percent` percent ink.
pub fn random_binary32(rng: &mut XorShiftRng, fill_percent: usize) -> BinaryImage32 {
    BinaryImage32::from_fn(|_, _| rng.below(100) < fill_percent)
}

/// Random two-level glyph: a handful of ink discs (one random dark value) on
/// a white canvas of random size. Two-level images keep thresholding exact
/// under padding, which the translation-invariance checks rely on. Always
/// contains at least one ink pixel.
pub fn random_glyph(rng: &mut XorShiftRng) -> GrayImage {
    let width = 26 + rng.below(26);
    let height = 26 + rng.below(26);
    let ink = rng.below(141) as u8;
    let blobs: Vec<(usize, usize, usize)> = (0..1 + rng.below(5))
        .map(|_| {
            (
                3 + rng.below(width - 6),
                3 + rng.below(height - 6),
                1 + rng.below(5),
            )
        })
        .collect();
    GrayImage::from_fn(width, height, |x, y| {
        let hit = blobs.iter().any(|&(cx, cy, r)| {
            let dx = x as i64 - cx as i64;
            let dy = y as i64 - cy as i64;
            dx * dx + dy * dy <= (r * r) as i64
        });
        if hit {
            ink
        } else {
            255
        }
    })
}

/// Surround an image with a uniform border.
pub fn pad_uniform(
    img: &GrayImage,
    left: usize,
    top: usize,
    right: usize,
    bottom: usize,
    value: u8,
) -> GrayImage {
    GrayImage::from_fn(
        img.width() + left + right,
        img.height() + top + bottom,
        |x, y| {
            if (left..left + img.width()).contains(&x) && (top..top + img.height()).contains(&y) {
                img.get(x - left, y - top)
            } else {
                value
            }
        },
    )
}

/// Rotate a normalized glyph 90 degrees clockwise.
pub fn rotate90cw(img: &BinaryImage32) -> BinaryImage32 {
    BinaryImage32::from_fn(|x, y| img.is_ink(y, 31 - x))
}
