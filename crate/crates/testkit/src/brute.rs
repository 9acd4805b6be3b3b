//! Brute-force feature extractor used as an independent oracle.
//!
//! Rebuilds the whole geometry from scratch: its own window list, its own
//! octant fan, barycentric point-in-triangle tests, and full-frame pixel
//! scans. It shares only the arithmetic conventions that define the feature
//! values themselves (bin index as `floor(t * bins)`, means computed as
//! sum / count / 32), which all operate on exactly representable values, so
//! agreement with the production extractor is bit-for-bit.

use numeral_core::preprocess::BinaryImage32;

const FRAME: f64 = 32.0;

type Pt = (f64, f64);

fn window_list() -> [(f64, f64, f64); 3] {
    // (x0, y0, side)
    [(0.0, 0.0, 32.0), (4.0, 4.0, 24.0), (8.0, 8.0, 16.0)]
}

/// Anchor ring of a square window: corners and side midpoints, clockwise
/// from the top-left corner.
fn anchors(x0: f64, y0: f64, s: f64) -> [Pt; 8] {
    [
        (x0, y0),
        (x0 + s / 2.0, y0),
        (x0 + s, y0),
        (x0 + s, y0 + s / 2.0),
        (x0 + s, y0 + s),
        (x0 + s / 2.0, y0 + s),
        (x0, y0 + s),
        (x0, y0 + s / 2.0),
    ]
}

fn triangle(x0: f64, y0: f64, s: f64, k: usize) -> [Pt; 3] {
    let ring = anchors(x0, y0, s);
    let center = (x0 + s / 2.0, y0 + s / 2.0);
    [center, ring[k], ring[(k + 1) % 8]]
}

/// Closed membership via barycentric sign tests.
fn in_triangle(tri: &[Pt; 3], p: Pt) -> bool {
    let (ax, ay) = tri[0];
    let (bx, by) = tri[1];
    let (cx, cy) = tri[2];
    let area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    let s = (p.0 - ax) * (cy - ay) - (p.1 - ay) * (cx - ax);
    let t = (bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax);
    let (s, t, area2) = if area2 < 0.0 {
        (-s, -t, -area2)
    } else {
        (s, t, area2)
    };
    s >= 0.0 && t >= 0.0 && s + t <= area2
}

fn sides_of(tri: &[Pt; 3]) -> [(Pt, Pt); 3] {
    [(tri[1], tri[2]), (tri[0], tri[1]), (tri[0], tri[2])]
}

fn bins_of(a: Pt, b: Pt) -> usize {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    (dx * dx + dy * dy).sqrt().ceil() as usize
}

fn bin_of(p: Pt, a: Pt, b: Pt, bins: usize) -> usize {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let len2 = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    ((t * bins as f64).floor() as usize).min(bins - 1)
}

/// Extract all 88 features the slow way. Layout matches the production
/// extractor: 24 shadows per window for windows 0..3, then 16 centroids.
pub fn brute_extract_features(img: &BinaryImage32) -> Vec<f64> {
    let mut out = Vec::with_capacity(88);

    for (x0, y0, s) in window_list() {
        for k in 0..8 {
            let tri = triangle(x0, y0, s, k);
            for (a, b) in sides_of(&tri) {
                let bins = bins_of(a, b);
                let mut lit = vec![false; bins];
                for py in 0..32usize {
                    for px in 0..32usize {
                        if !img.is_ink(px, py) {
                            continue;
                        }
                        let p = (px as f64 + 0.5, py as f64 + 0.5);
                        let in_window = p.0 >= x0 && p.0 <= x0 + s && p.1 >= y0 && p.1 <= y0 + s;
                        if in_window && in_triangle(&tri, p) {
                            lit[bin_of(p, a, b, bins)] = true;
                        }
                    }
                }
                out.push(lit.iter().filter(|&&l| l).count() as f64 / bins as f64);
            }
        }
    }

    // Centroids over the full frame, lowest containing octant wins.
    let full: Vec<[Pt; 3]> = (0..8).map(|k| triangle(0.0, 0.0, 32.0, k)).collect();
    let mut sums = [(0.0f64, 0.0f64, 0usize); 8];
    for py in 0..32usize {
        for px in 0..32usize {
            if !img.is_ink(px, py) {
                continue;
            }
            let p = (px as f64 + 0.5, py as f64 + 0.5);
            let k = full
                .iter()
                .position(|tri| in_triangle(tri, p))
                .expect("octants cover the frame");
            sums[k].0 += p.0;
            sums[k].1 += p.1;
            sums[k].2 += 1;
        }
    }
    for (k, &(sx, sy, n)) in sums.iter().enumerate() {
        let (cx, cy) = if n > 0 {
            (sx / n as f64, sy / n as f64)
        } else {
            let tri = &full[k];
            (
                (tri[0].0 + tri[1].0 + tri[2].0) / 3.0,
                (tri[0].1 + tri[1].1 + tri[2].1) / 3.0,
            )
        };
        out.push(cx / FRAME);
        out.push(cy / FRAME);
    }

    out
}
