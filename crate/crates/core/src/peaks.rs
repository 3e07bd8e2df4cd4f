//! Local-maximum detection on sampled densities.

use crate::grid::SpatialGrid;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    /// Sub-grid position from a parabola through the three top samples.
    pub z: f64,
    pub height: f64,
    /// Height above the higher of the two saddles separating this peak from
    /// taller terrain (or the domain edge).
    pub prominence: f64,
}

/// Strict 5-point local maxima above `rel_threshold · max`, ordered by
/// decreasing prominence.
pub fn find_peaks(grid: &SpatialGrid, r: &[f64], rel_threshold: f64) -> Vec<Peak> {
    let n = r.len();
    let top = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if n < 5 || !(top > 0.0) {
        return Vec::new();
    }
    let floor = rel_threshold * top;
    let mut out = Vec::new();
    for i in 2..n - 2 {
        let v = r[i];
        if v <= floor || !(v > r[i - 1] && v >= r[i + 1] && v > r[i - 2] && v >= r[i + 2]) {
            continue;
        }
        out.push(Peak { z: refine(grid, r, i), height: v, prominence: prominence(r, i) });
    }
    out.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
    out
}

/// The `k` most prominent peaks, sorted by position.
pub fn dominant_peaks(grid: &SpatialGrid, r: &[f64], k: usize) -> Vec<Peak> {
    let mut p = find_peaks(grid, r, 0.01);
    p.truncate(k);
    p.sort_by(|a, b| a.z.total_cmp(&b.z));
    p
}

fn refine(grid: &SpatialGrid, r: &[f64], i: usize) -> f64 {
    let (a, b, c) = (r[i - 1], r[i], r[i + 1]);
    let den = a - 2.0 * b + c;
    let off = if den < 0.0 { 0.5 * (a - c) / den } else { 0.0 };
    grid.positions()[i] + off.clamp(-0.5, 0.5) * grid.dz()
}

fn prominence(r: &[f64], i: usize) -> f64 {
    let v = r[i];
    let mut left_min = v;
    let mut j = i;
    while j > 0 {
        j -= 1;
        if r[j] > v {
            break;
        }
        left_min = left_min.min(r[j]);
    }
    let mut right_min = v;
    for &x in &r[i + 1..] {
        if x > v {
            break;
        }
        right_min = right_min.min(x);
    }
    v - left_min.max(right_min)
}
