//! The 88-element feature vector: 72 shadow features over three overlapping
//! windows plus 16 centroid features over the octants of the full frame.
//!
//! Each square window is fanned into eight triangular octants around its
//! center, one per corner or side midpoint. A shadow feature measures how much
//! of one octant side is covered by the orthogonal projections of the octant's
//! ink pixels, discretized into unit bins; a centroid feature is a normalized
//! mean ink coordinate within an octant.

use crate::par;
use crate::preprocess::{BinaryImage32, NORMALIZED_SIZE};

pub const WINDOW_COUNT: usize = 3;
pub const OCTANT_COUNT: usize = 8;
pub const SIDES_PER_OCTANT: usize = 3;
pub const SHADOW_COUNT: usize = WINDOW_COUNT * OCTANT_COUNT * SIDES_PER_OCTANT;
pub const CENTROID_COUNT: usize = 2 * OCTANT_COUNT;
pub const FEATURE_COUNT: usize = SHADOW_COUNT + CENTROID_COUNT;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Square sub-window of the 32x32 frame, in pixel units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Window {
    pub fn square(x0: usize, y0: usize, size: usize) -> Self {
        Window {
            x0,
            y0,
            w: size,
            h: size,
        }
    }

    pub fn center(&self) -> Point {
        Point {
            x: self.x0 as f64 + self.w as f64 / 2.0,
            y: self.y0 as f64 + self.h as f64 / 2.0,
        }
    }
}

/// The three concentric windows: full frame, 24x24, 16x16, all centered.
pub fn make_windows() -> [Window; WINDOW_COUNT] {
    [
        Window::square(0, 0, 32),
        Window::square(4, 4, 24),
        Window::square(8, 8, 16),
    ]
}

/// One triangular octant of a window: the window center plus two consecutive
/// boundary anchors (corners and side midpoints), indexed 0..8 clockwise from
/// the top-left corner.
#[derive(Clone, Copy, Debug)]
pub struct Octant {
    pub index: usize,
    /// `[center, first anchor, second anchor]`.
    pub vertices: [Point; 3],
}

impl Octant {
    /// Sides in feature order: the outer edge, then the two radial edges in
    /// vertex order.
    pub fn sides(&self) -> [(Point, Point); SIDES_PER_OCTANT] {
        let [c, a, b] = self.vertices;
        [(a, b), (c, a), (c, b)]
    }

    /// Closed point-in-triangle test. Exact for this geometry: vertices sit
    /// on integer coordinates and pixel centers on half-integers, so the
    /// cross products below are computed without rounding.
    pub fn contains(&self, p: Point) -> bool {
        let [v0, v1, v2] = self.vertices;
        let d0 = cross(v0, v1, p);
        let d1 = cross(v1, v2, p);
        let d2 = cross(v2, v0, p);
        let has_neg = d0 < 0.0 || d1 < 0.0 || d2 < 0.0;
        let has_pos = d0 > 0.0 || d1 > 0.0 || d2 > 0.0;
        !(has_neg && has_pos)
    }

    pub fn area(&self) -> f64 {
        let [v0, v1, v2] = self.vertices;
        cross(v0, v1, v2).abs() / 2.0
    }

    /// Vertex average, the fallback location for octants with no ink.
    pub fn centroid(&self) -> Point {
        let [v0, v1, v2] = self.vertices;
        Point {
            x: (v0.x + v1.x + v2.x) / 3.0,
            y: (v0.y + v1.y + v2.y) / 3.0,
        }
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Fan a window into its eight octants.
pub fn make_octants(win: &Window) -> [Octant; OCTANT_COUNT] {
    assert_eq!(win.w, win.h, "octants are defined for square windows");
    let x0 = win.x0 as f64;
    let y0 = win.y0 as f64;
    let s = win.w as f64;
    let c = win.center();
    let anchors = [
        Point { x: x0, y: y0 }, // top-left corner
        Point {
            x: x0 + s / 2.0,
            y: y0,
        }, // top midpoint
        Point { x: x0 + s, y: y0 }, // top-right corner
        Point {
            x: x0 + s,
            y: y0 + s / 2.0,
        }, // right midpoint
        Point {
            x: x0 + s,
            y: y0 + s,
        }, // bottom-right corner
        Point {
            x: x0 + s / 2.0,
            y: y0 + s,
        }, // bottom midpoint
        Point { x: x0, y: y0 + s }, // bottom-left corner
        Point {
            x: x0,
            y: y0 + s / 2.0,
        }, // left midpoint
    ];
    std::array::from_fn(|k| Octant {
        index: k,
        vertices: [c, anchors[k], anchors[(k + 1) % OCTANT_COUNT]],
    })
}

/// Lowest-index octant whose closed triangle contains `p`. Every point of the
/// window is covered, so this is a total partition of the pixel centers.
pub fn partition_octant(octants: &[Octant; OCTANT_COUNT], p: Point) -> usize {
    octants
        .iter()
        .position(|o| o.contains(p))
        .expect("octants tile the window")
}

fn side_bin_count(a: Point, b: Point) -> usize {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    (dx * dx + dy * dy).sqrt().ceil() as usize
}

fn projection_bin(p: Point, a: Point, b: Point, bins: usize) -> usize {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    ((t * bins as f64).floor() as usize).min(bins - 1)
}

/// 24 shadow features of one window: for each octant and each of its sides,
/// the fraction of the side's unit bins hit by orthogonal projections of the
/// octant's ink-pixel centers. Pixels on a shared octant edge project for
/// both neighbors, so a fully inked window saturates every feature at 1.
pub fn shadow_features_window(
    img: &BinaryImage32,
    win: &Window,
) -> [f64; OCTANT_COUNT * SIDES_PER_OCTANT] {
    assert!(
        win.x0 + win.w <= NORMALIZED_SIZE && win.y0 + win.h <= NORMALIZED_SIZE,
        "window exceeds the 32x32 frame"
    );
    let octants = make_octants(win);
    let sides: Vec<[(Point, Point); SIDES_PER_OCTANT]> =
        octants.iter().map(|o| o.sides()).collect();
    let bins: Vec<[usize; SIDES_PER_OCTANT]> = sides
        .iter()
        .map(|s| std::array::from_fn(|i| side_bin_count(s[i].0, s[i].1)))
        .collect();

    let mut lit = [[0u32; SIDES_PER_OCTANT]; OCTANT_COUNT];
    for py in win.y0..win.y0 + win.h {
        for px in win.x0..win.x0 + win.w {
            if !img.is_ink(px, py) {
                continue;
            }
            let p = Point {
                x: px as f64 + 0.5,
                y: py as f64 + 0.5,
            };
            for oct in &octants {
                if !oct.contains(p) {
                    continue;
                }
                for (si, &(a, b)) in sides[oct.index].iter().enumerate() {
                    let bin = projection_bin(p, a, b, bins[oct.index][si]);
                    lit[oct.index][si] |= 1 << bin;
                }
            }
        }
    }

    let mut out = [0.0; OCTANT_COUNT * SIDES_PER_OCTANT];
    for k in 0..OCTANT_COUNT {
        for si in 0..SIDES_PER_OCTANT {
            out[k * SIDES_PER_OCTANT + si] = lit[k][si].count_ones() as f64 / bins[k][si] as f64;
        }
    }
    out
}

/// 72 shadow features: the three windows' blocks concatenated in window order.
pub fn shadow_features(img: &BinaryImage32) -> [f64; SHADOW_COUNT] {
    let mut out = [0.0; SHADOW_COUNT];
    for (wi, win) in make_windows().iter().enumerate() {
        let block = shadow_features_window(img, win);
        out[wi * block.len()..(wi + 1) * block.len()].copy_from_slice(&block);
    }
    out
}

/// 16 centroid features: for each octant of the full frame, the mean ink
/// coordinate divided by 32, x then y. Octants with no ink report their
/// triangle centroid instead, also divided by 32.
pub fn centroid_features(img: &BinaryImage32) -> [f64; CENTROID_COUNT] {
    let frame = make_windows()[0];
    let octants = make_octants(&frame);
    let mut sum_x = [0.0f64; OCTANT_COUNT];
    let mut sum_y = [0.0f64; OCTANT_COUNT];
    let mut count = [0usize; OCTANT_COUNT];

    for py in 0..NORMALIZED_SIZE {
        for px in 0..NORMALIZED_SIZE {
            if !img.is_ink(px, py) {
                continue;
            }
            let p = Point {
                x: px as f64 + 0.5,
                y: py as f64 + 0.5,
            };
            let k = partition_octant(&octants, p);
            sum_x[k] += p.x;
            sum_y[k] += p.y;
            count[k] += 1;
        }
    }

    let scale = NORMALIZED_SIZE as f64;
    let mut out = [0.0; CENTROID_COUNT];
    for k in 0..OCTANT_COUNT {
        let (cx, cy) = if count[k] > 0 {
            (sum_x[k] / count[k] as f64, sum_y[k] / count[k] as f64)
        } else {
            let c = octants[k].centroid();
            (c.x, c.y)
        };
        out[2 * k] = cx / scale;
        out[2 * k + 1] = cy / scale;
    }
    out
}

/// The full 88-element vector: shadows for windows 0..3, then centroids.
/// Every component lies in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.values
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.values.to_vec()
    }
}

pub fn extract_features(img: &BinaryImage32) -> FeatureVector {
    let mut values = [0.0; FEATURE_COUNT];
    values[..SHADOW_COUNT].copy_from_slice(&shadow_features(img));
    values[SHADOW_COUNT..].copy_from_slice(&centroid_features(img));
    FeatureVector { values }
}

/// Feature extraction over a batch, preserving input order.
pub fn extract_batch(images: &[BinaryImage32]) -> Vec<FeatureVector> {
    par::map_slice(images, extract_features)
}

/// Sequential twin of [`extract_batch`]; the benchmarks compare the two.
pub fn extract_batch_seq(images: &[BinaryImage32]) -> Vec<FeatureVector> {
    images.iter().map(extract_features).collect()
}
