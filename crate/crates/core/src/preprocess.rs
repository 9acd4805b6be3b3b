//! Glyph normalization: threshold, locate the minimal bounding box, rescale
//! the gray crop to 32x32 with bilinear interpolation, threshold again.

use crate::dataset::{GrayImage, SampleSet};
use crate::error::{Error, Result};
use crate::par;

/// Side length of the canonical normalized glyph.
pub const NORMALIZED_SIZE: usize = 32;

/// How to pick the ink threshold. A pixel is ink iff its intensity is
/// strictly below the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdPolicy {
    /// Maximize between-class variance over the intensity histogram.
    Otsu,
    Fixed(u8),
}

/// Row-major binary raster; 1 = ink, 0 = background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinaryImage {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y) as u8);
            }
        }
        BinaryImage {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_ink(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x] == 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// Render as grayscale: ink black (0), background white (255).
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            if self.is_ink(x, y) {
                0
            } else {
                255
            }
        })
    }
}

/// A [`BinaryImage`] guaranteed to be exactly 32x32. Produced by
/// [`normalize_sample`]; tests may build one via [`BinaryImage32::from_fn`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage32 {
    inner: BinaryImage,
}

impl BinaryImage32 {
    pub fn new(image: BinaryImage) -> Result<Self> {
        if image.width != NORMALIZED_SIZE || image.height != NORMALIZED_SIZE {
            return Err(Error::DimensionMismatch {
                expected: NORMALIZED_SIZE,
                found: image.width.max(image.height),
            });
        }
        Ok(BinaryImage32 { inner: image })
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> bool) -> Self {
        BinaryImage32 {
            inner: BinaryImage::from_fn(NORMALIZED_SIZE, NORMALIZED_SIZE, f),
        }
    }
}

impl std::ops::Deref for BinaryImage32 {
    type Target = BinaryImage;

    fn deref(&self) -> &BinaryImage {
        &self.inner
    }
}

/// Axis-aligned pixel rectangle, top-left corner plus extent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

/// Otsu's threshold: the value `t` maximizing the between-class variance of
/// the split `{p < t}` / `{p >= t}`. Among equally good thresholds the
/// smallest wins, so for a two-level image the threshold lands just above the
/// dark level. A uniform image yields `0` (no ink).
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let total_sum: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let mut best_t = 0u8;
    let mut best_var = -1.0f64;
    let mut count_below = 0.0f64;
    let mut sum_below = 0.0f64;
    for t in 0..=255usize {
        if t > 0 {
            count_below += hist[t - 1] as f64;
            sum_below += (t - 1) as f64 * hist[t - 1] as f64;
        }
        let count_above = total - count_below;
        if count_below == 0.0 || count_above == 0.0 {
            continue;
        }
        let mean_below = sum_below / count_below;
        let mean_above = (total_sum - sum_below) / count_above;
        let var = count_below * count_above * (mean_below - mean_above).powi(2);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Threshold an image. Same dimensions; ink iff intensity < threshold.
pub fn binarize(img: &GrayImage, policy: ThresholdPolicy) -> BinaryImage {
    let t = match policy {
        ThresholdPolicy::Fixed(t) => t,
        ThresholdPolicy::Otsu => otsu_threshold(img),
    };
    BinaryImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) < t)
}

/// Tightest rectangle containing every ink pixel.
pub fn minimal_bounding_box(img: &BinaryImage) -> Result<Rect> {
    let mut min_x = usize::MAX;
    let mut min_y = usize::MAX;
    let mut max_x = 0usize;
    let mut max_y = 0usize;
    let mut found = false;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.is_ink(x, y) {
                found = true;
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if !found {
        return Err(Error::EmptyGlyph);
    }
    Ok(Rect {
        x0: min_x,
        y0: min_y,
        w: max_x - min_x + 1,
        h: max_y - min_y + 1,
    })
}

/// Crop `rect` out of `img` and rescale it to 32x32 with bilinear
/// interpolation. Width and height scale independently (no aspect-ratio
/// preservation). Sample positions align the crop's corner pixels with the
/// output's corner pixels, so a 32x32 crop passes through unchanged.
pub fn crop_and_scale(img: &GrayImage, rect: Rect) -> Result<GrayImage> {
    if rect.w == 0
        || rect.h == 0
        || rect.x0 + rect.w > img.width()
        || rect.y0 + rect.h > img.height()
    {
        return Err(Error::RectOutOfBounds {
            x0: rect.x0,
            y0: rect.y0,
            w: rect.w,
            h: rect.h,
            width: img.width(),
            height: img.height(),
        });
    }

    let span = (NORMALIZED_SIZE - 1) as f64;
    let map = |out: usize, src_len: usize| -> f64 {
        if src_len == 1 {
            0.0
        } else {
            out as f64 * (src_len - 1) as f64 / span
        }
    };

    let mut pixels = Vec::with_capacity(NORMALIZED_SIZE * NORMALIZED_SIZE);
    for v in 0..NORMALIZED_SIZE {
        let sy = map(v, rect.h);
        let y_lo = sy.floor() as usize;
        let y_hi = (y_lo + 1).min(rect.h - 1);
        let fy = sy - y_lo as f64;
        for u in 0..NORMALIZED_SIZE {
            let sx = map(u, rect.w);
            let x_lo = sx.floor() as usize;
            let x_hi = (x_lo + 1).min(rect.w - 1);
            let fx = sx - x_lo as f64;

            let p00 = img.get(rect.x0 + x_lo, rect.y0 + y_lo) as f64;
            let p10 = img.get(rect.x0 + x_hi, rect.y0 + y_lo) as f64;
            let p01 = img.get(rect.x0 + x_lo, rect.y0 + y_hi) as f64;
            let p11 = img.get(rect.x0 + x_hi, rect.y0 + y_hi) as f64;

            let value = p00 * (1.0 - fx) * (1.0 - fy)
                + p10 * fx * (1.0 - fy)
                + p01 * (1.0 - fx) * fy
                + p11 * fx * fy;
            pixels.push(value.round() as u8);
        }
    }
    GrayImage::new(NORMALIZED_SIZE, NORMALIZED_SIZE, pixels)
}

/// Full normalization pipeline: threshold to locate the bounding box, crop
/// and rescale the gray image, threshold again.
///
/// Returns [`Error::EmptyGlyph`] when the first thresholding pass finds no
/// ink. If rescaling flattens the crop so far that the second pass finds no
/// ink (a degenerate glyph that filled its own box, e.g. a single pixel),
/// the darkest pixels of the scaled crop are marked as ink instead - the box
/// is known to contain the glyph, so an empty result would misreport it.
pub fn normalize_sample(img: &GrayImage, policy: ThresholdPolicy) -> Result<BinaryImage32> {
    let coarse = binarize(img, policy);
    let rect = minimal_bounding_box(&coarse)?;
    let scaled = crop_and_scale(img, rect)?;
    let mut bits = binarize(&scaled, policy);
    if bits.ink_count() == 0 {
        let darkest = *scaled.pixels().iter().min().expect("32x32 is nonempty");
        bits = BinaryImage::from_fn(NORMALIZED_SIZE, NORMALIZED_SIZE, |x, y| {
            scaled.get(x, y) == darkest
        });
    }
    BinaryImage32::new(bits)
}

/// Normalize every sample of a set, preserving input order. Entries that
/// fail (empty glyphs) keep their error so callers can count and skip them.
pub fn normalize_set(set: &SampleSet, policy: ThresholdPolicy) -> Vec<Result<BinaryImage32>> {
    par::map_slice(&set.samples, |s| normalize_sample(&s.image, policy))
}

/// Sequential twin of [`normalize_set`]; the benchmarks compare the two.
pub fn normalize_set_seq(set: &SampleSet, policy: ThresholdPolicy) -> Vec<Result<BinaryImage32>> {
    set.samples
        .iter()
        .map(|s| normalize_sample(&s.image, policy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(width: usize, height: usize, pixels: &[u8]) -> GrayImage {
        GrayImage::new(width, height, pixels.to_vec()).unwrap()
    }

    #[test]
    fn fixed_threshold_extremes() {
        let img = gray(2, 1, &[0, 255]);
        let bits = binarize(&img, ThresholdPolicy::Fixed(128));
        assert_eq!(bits.bits(), &[1, 0]);
    }

    #[test]
    fn fixed_threshold_is_strict_less_than() {
        let img = gray(3, 1, &[50, 50, 50]);
        let bits = binarize(&img, ThresholdPolicy::Fixed(50));
        assert_eq!(bits.bits(), &[0, 0, 0]);
    }

    #[test]
    fn otsu_separates_bimodal_image() {
        let img = gray(4, 1, &[10, 12, 240, 242]);
        let t = otsu_threshold(&img);
        assert!(t > 12 && t < 240, "threshold {t} outside the gap");
        let bits = binarize(&img, ThresholdPolicy::Otsu);
        assert_eq!(bits.bits(), &[1, 1, 0, 0]);
    }

    #[test]
    fn otsu_matches_exhaustive_variance_scan() {
        // Independent oracle: recompute the between-class variance for all
        // 256 thresholds directly from the definition and check the chosen
        // threshold is the smallest maximizer.
        let img = gray(
            8,
            2,
            &[
                3, 9, 14, 30, 88, 90, 201, 230, 17, 5, 88, 90, 230, 201, 3, 9,
            ],
        );
        let t = otsu_threshold(&img) as usize;

        let variance = |thr: usize| -> f64 {
            let (mut na, mut sa, mut nb, mut sb) = (0f64, 0f64, 0f64, 0f64);
            for &p in img.pixels() {
                if (p as usize) < thr {
                    na += 1.0;
                    sa += p as f64;
                } else {
                    nb += 1.0;
                    sb += p as f64;
                }
            }
            if na == 0.0 || nb == 0.0 {
                return -1.0;
            }
            na * nb * (sa / na - sb / nb).powi(2)
        };

        let best = (0..=255).map(variance).fold(f64::MIN, f64::max);
        assert!(variance(t) >= best - 1e-9);
        for smaller in 0..t {
            assert!(
                variance(smaller) < best - 1e-9,
                "t={t} not the smallest maximizer"
            );
        }
    }

    #[test]
    fn otsu_on_uniform_image_marks_nothing() {
        let img = gray(4, 1, &[200, 200, 200, 200]);
        assert_eq!(otsu_threshold(&img), 0);
        assert_eq!(binarize(&img, ThresholdPolicy::Otsu).ink_count(), 0);
    }

    #[test]
    fn bounding_box_single_pixel() {
        let bits = BinaryImage::from_fn(10, 10, |x, y| x == 5 && y == 7);
        assert_eq!(
            minimal_bounding_box(&bits).unwrap(),
            Rect {
                x0: 5,
                y0: 7,
                w: 1,
                h: 1
            }
        );
    }

    #[test]
    fn bounding_box_all_ink() {
        let bits = BinaryImage::from_fn(4, 4, |_, _| true);
        assert_eq!(
            minimal_bounding_box(&bits).unwrap(),
            Rect {
                x0: 0,
                y0: 0,
                w: 4,
                h: 4
            }
        );
    }

    #[test]
    fn bounding_box_matches_brute_force_extremes() {
        let bits = BinaryImage::from_fn(8, 8, |x, y| (x, y) == (1, 2) || (x, y) == (6, 3));
        // Brute-force oracle: min/max over explicit ink coordinates.
        let coords = [(1usize, 2usize), (6, 3)];
        let x0 = coords.iter().map(|c| c.0).min().unwrap();
        let y0 = coords.iter().map(|c| c.1).min().unwrap();
        let x1 = coords.iter().map(|c| c.0).max().unwrap();
        let y1 = coords.iter().map(|c| c.1).max().unwrap();
        let expect = Rect {
            x0,
            y0,
            w: x1 - x0 + 1,
            h: y1 - y0 + 1,
        };
        assert_eq!(minimal_bounding_box(&bits).unwrap(), expect);
        assert_eq!(
            expect,
            Rect {
                x0: 1,
                y0: 2,
                w: 6,
                h: 2
            }
        );
    }

    #[test]
    fn bounding_box_of_blank_image_is_empty_glyph() {
        let bits = BinaryImage::from_fn(4, 4, |_, _| false);
        assert!(matches!(
            minimal_bounding_box(&bits),
            Err(Error::EmptyGlyph)
        ));
    }

    #[test]
    fn scaling_a_uniform_region_is_uniform() {
        let img = GrayImage::from_fn(9, 5, |_, _| 173);
        let out = crop_and_scale(
            &img,
            Rect {
                x0: 2,
                y0: 1,
                w: 5,
                h: 3,
            },
        )
        .unwrap();
        assert!(out.pixels().iter().all(|&p| p == 173));
    }

    #[test]
    fn identity_scale_is_exact() {
        let mut rng = crate::rng::XorShiftRng::new(11);
        let img = GrayImage::from_fn(32, 32, |_, _| rng.below(256) as u8);
        let out = crop_and_scale(
            &img,
            Rect {
                x0: 0,
                y0: 0,
                w: 32,
                h: 32,
            },
        )
        .unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn two_by_two_crop_matches_direct_bilinear_formula() {
        let img = gray(2, 2, &[0, 255, 255, 0]);
        let out = crop_and_scale(
            &img,
            Rect {
                x0: 0,
                y0: 0,
                w: 2,
                h: 2,
            },
        )
        .unwrap();

        assert_eq!(out.get(0, 0), 0);
        assert_eq!(out.get(31, 0), 255);
        assert_eq!(out.get(0, 31), 255);
        assert_eq!(out.get(31, 31), 0);

        // Independent evaluator: closed-form bilinear surface of the 2x2
        // corner values at the same sample positions.
        let corner = [[0.0f64, 255.0], [255.0, 0.0]];
        for &(u, v) in &[(15usize, 15usize), (7, 23), (16, 3), (31, 15), (1, 1)] {
            let fx = u as f64 / 31.0;
            let fy = v as f64 / 31.0;
            let expect = corner[0][0] * (1.0 - fx) * (1.0 - fy)
                + corner[0][1] * fx * (1.0 - fy)
                + corner[1][0] * (1.0 - fx) * fy
                + corner[1][1] * fx * fy;
            assert_eq!(out.get(u, v), expect.round() as u8, "at ({u},{v})");
        }
    }

    #[test]
    fn out_of_bounds_rect_is_rejected() {
        let img = GrayImage::from_fn(4, 4, |_, _| 0);
        assert!(matches!(
            crop_and_scale(
                &img,
                Rect {
                    x0: 2,
                    y0: 2,
                    w: 3,
                    h: 1
                }
            ),
            Err(Error::RectOutOfBounds { .. })
        ));
    }

    #[test]
    fn normalize_is_a_fixed_point_on_full_frame_glyphs() {
        // A 32x32 black-on-white glyph whose bounding box spans the frame.
        let img = GrayImage::from_fn(32, 32, |x, y| {
            let on_ring = x == 0 || y == 0 || x == 31 || y == 31;
            let on_bar = y == 16 && x > 4 && x < 28;
            if on_ring || on_bar {
                10
            } else {
                250
            }
        });
        let direct = binarize(&img, ThresholdPolicy::Otsu);
        let normalized = normalize_sample(&img, ThresholdPolicy::Otsu).unwrap();
        assert_eq!(normalized.bits(), direct.bits());
    }

    #[test]
    fn padding_does_not_change_the_output() {
        let glyph = GrayImage::from_fn(20, 14, |x, y| {
            if (x + 2 * y) % 5 < 2 && x > 1 && y > 1 {
                30
            } else {
                255
            }
        });
        let padded = GrayImage::from_fn(40, 34, |x, y| {
            if (10..30).contains(&x) && (10..24).contains(&y) {
                glyph.get(x - 10, y - 10)
            } else {
                255
            }
        });
        let a = normalize_sample(&glyph, ThresholdPolicy::Otsu).unwrap();
        let b = normalize_sample(&padded, ThresholdPolicy::Otsu).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_pixel_glyph_still_produces_ink() {
        let img = GrayImage::from_fn(9, 9, |x, y| if (x, y) == (4, 4) { 0 } else { 255 });
        let out = normalize_sample(&img, ThresholdPolicy::Otsu).unwrap();
        assert_eq!(out.ink_count(), 32 * 32);
    }

    #[test]
    fn blank_image_is_an_empty_glyph_error() {
        let img = GrayImage::from_fn(8, 8, |_, _| 255);
        assert!(matches!(
            normalize_sample(&img, ThresholdPolicy::Otsu),
            Err(Error::EmptyGlyph)
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn blob_image(seed: u64) -> GrayImage {
            let mut rng = crate::rng::XorShiftRng::new(seed);
            let width = 24 + rng.below(30);
            let height = 24 + rng.below(30);
            let ink = rng.below(140) as u8;
            let blobs: Vec<(usize, usize, usize)> = (0..2 + rng.below(4))
                .map(|_| {
                    (
                        4 + rng.below(width - 8),
                        4 + rng.below(height - 8),
                        2 + rng.below(5),
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

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn normalized_blobs_are_32x32_with_ink(seed in any::<u64>()) {
                let img = blob_image(seed);
                let out = normalize_sample(&img, ThresholdPolicy::Otsu).unwrap();
                prop_assert_eq!(out.width(), 32);
                prop_assert_eq!(out.height(), 32);
                prop_assert!(out.ink_count() >= 1);
            }

            #[test]
            fn normalization_is_translation_invariant(
                seed in any::<u64>(),
                left in 0usize..12,
                top in 0usize..12,
                right in 0usize..12,
                bottom in 0usize..12,
            ) {
                let img = blob_image(seed);
                let padded = GrayImage::from_fn(
                    img.width() + left + right,
                    img.height() + top + bottom,
                    |x, y| {
                        if (left..left + img.width()).contains(&x)
                            && (top..top + img.height()).contains(&y)
                        {
                            img.get(x - left, y - top)
                        } else {
                            255
                        }
                    },
                );
                let a = normalize_sample(&img, ThresholdPolicy::Otsu).unwrap();
                let b = normalize_sample(&padded, ThresholdPolicy::Otsu).unwrap();
                prop_assert_eq!(a, b);
            }

            #[test]
            fn binarize_is_idempotent_on_two_level_images(seed in any::<u64>()) {
                let mut rng = crate::rng::XorShiftRng::new(seed);
                let img = GrayImage::from_fn(16, 16, |_, _| if rng.below(2) == 0 { 0 } else { 255 });
                let bits = binarize(&img, ThresholdPolicy::Fixed(128));
                let again = binarize(&bits.to_gray(), ThresholdPolicy::Fixed(128));
                prop_assert_eq!(bits, again);
            }
        }
    }
}
