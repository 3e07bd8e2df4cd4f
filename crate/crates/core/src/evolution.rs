//! Free evolution and light-cone diagnostics.

use crate::dispersion::multiplier_evolution;
use crate::error::{Error, Result};
use crate::grid::apply_multiplier;
use crate::peaks::{dominant_peaks, find_peaks};
use crate::states::{density, DensityProfile, WavePacket};

/// Multiplies the momentum amplitude by `e^{-iω(p)t}`. Works for either
/// yardstick since both the evolution and the conversion are diagonal in `p`.
pub fn evolve_free(pkt: &WavePacket, t: f64) -> Result<WavePacket> {
    if !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(pkt.clone());
    }
    let amp = apply_multiplier(pkt.amplitude(), &multiplier_evolution(pkt.params(), t))?;
    Ok(pkt.with_amplitude(amp))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightConeReport {
    pub t: f64,
    pub cone_edges: (f64, f64),
    pub fraction_outside: f64,
    /// Local maxima above 1% of the peak, ordered by position.
    pub peak_positions: Vec<f64>,
}

/// Fraction of a normalized density outside `center ± (w + c t)`.
pub fn lightcone_fraction(d: &DensityProfile, w: f64, t: f64, c: f64) -> Result<LightConeReport> {
    lightcone_fraction_about(d, 0.0, w, t, c)
}

pub fn lightcone_fraction_about(d: &DensityProfile, center: f64, w: f64, t: f64, c: f64) -> Result<LightConeReport> {
    let total = d.integral();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(total));
    }
    let half = w + c * t.abs();
    let (a, b) = (center - half, center + half);
    let g = d.grid();
    let last = g.positions()[g.n_points() - 1];
    let inside = if a <= g.z_min() && b >= last {
        total
    } else {
        linear_integral(d, a.max(g.z_min()), b.min(last))
    };
    let fraction_outside = (total - inside).clamp(0.0, 1.0);
    let mut peak_positions: Vec<f64> = find_peaks(g, d.values(), 0.01).iter().map(|p| p.z).collect();
    peak_positions.sort_by(f64::total_cmp);
    Ok(LightConeReport { t, cone_edges: (a, b), fraction_outside, peak_positions })
}

/// Integral of the piecewise-linear interpolant over `[a, b]` inside the grid.
fn linear_integral(d: &DensityProfile, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let g = d.grid();
    let dz = g.dz();
    let r = d.values();
    let x = |z: f64| (z - g.z_min()) / dz;
    let (xa, xb) = (x(a), x(b));
    let ia = xa.floor() as usize;
    let ib = (xb.floor() as usize).min(g.n_points() - 2);
    let seg = |i: usize, u0: f64, u1: f64| {
        // ∫ over local coordinate u ∈ [u0, u1] of r_i (1−u) + r_{i+1} u
        let (p, q) = (r[i], r[i + 1]);
        dz * (p * (u1 - u0) + (q - p) * 0.5 * (u1 * u1 - u0 * u0))
    };
    if ia == ib {
        return seg(ia, xa - ia as f64, xb - ia as f64);
    }
    let mut s = seg(ia, xa - ia as f64, 1.0);
    for i in ia + 1..ib {
        s += 0.5 * dz * (r[i] + r[i + 1]);
    }
    s + seg(ib, 0.0, xb - ib as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakTrack {
    pub t: f64,
    /// Up to four dominant maxima, ordered by position.
    pub peaks: Vec<f64>,
    /// Set when fewer than four maxima could be resolved.
    pub degraded: bool,
}

/// Dominant maxima of the evolved density at each time.
pub fn peak_tracks(pkt: &WavePacket, times: &[f64]) -> Result<Vec<PeakTrack>> {
    times
        .iter()
        .map(|&t| {
            let d = density(&evolve_free(pkt, t)?, false);
            let peaks: Vec<f64> = dominant_peaks(d.grid(), d.values(), 4).iter().map(|p| p.z).collect();
            Ok(PeakTrack { t, degraded: peaks.len() < 4, peaks })
        })
        .collect()
}
