//! Moving-frame densities for both yardsticks.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::{boost_momentum_map, omega, rapidity, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, ComplexField, SpatialGrid, Spectrum};
use crate::states::{DensityProfile, WavePacket, Yardstick};

const MAX_LOST_MASS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostParams {
    pub v: f64,
    pub theta: f64,
    pub gamma: f64,
}

impl BoostParams {
    pub fn from_velocity(params: &ModelParams, v: f64) -> Result<Self> {
        let theta = rapidity(params, v)?;
        Ok(BoostParams { v, theta, gamma: theta.cosh() })
    }

    pub fn from_rapidity(params: &ModelParams, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParams(format!("rapidity {theta} is not finite")));
        }
        Ok(BoostParams { v: params.c * theta.tanh(), theta, gamma: theta.cosh() })
    }

    pub fn inverse(&self) -> Self {
        BoostParams { v: -self.v, theta: -self.theta, gamma: self.gamma }
    }
}

/// `L_θ(z, t) = (z coshθ − c t sinhθ, t coshθ − (z/c) sinhθ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMap {
    pub theta: f64,
    pub c: f64,
}

impl LorentzMap {
    pub fn new(theta: f64, c: f64) -> Self {
        LorentzMap { theta, c }
    }

    pub fn apply(&self, z: f64, t: f64) -> (f64, f64) {
        let (ch, sh) = (self.theta.cosh(), self.theta.sinh());
        (z * ch - self.c * t * sh, t * ch - z / self.c * sh)
    }

    pub fn inverse(&self) -> Self {
        LorentzMap { theta: -self.theta, c: self.c }
    }
}

/// Output grid for a boosted packet: domain doubled, spacing refined by the
/// smallest power of two that covers the stretched momentum window.
pub fn boost_output_grid(grid: &SpatialGrid, theta: f64) -> Result<Arc<SpatialGrid>> {
    let stretch = theta.abs().exp();
    let mut r = 1usize;
    while (r as f64) < stretch {
        r *= 2;
    }
    grid.padded(2)?.refined(r)
}

/// Momentum-space remap `ψ'(p) = weight(p, q) ψ̂(q)` with `q = p(−θ)`, where
/// `ψ̂` is the band-limited transform of `amp`. Returns the new amplitude on
/// `out` and the input spectral mass that fell outside the source window.
fn remap(
    amp: &ComplexField,
    params: &ModelParams,
    theta: f64,
    out: &Arc<SpatialGrid>,
    weight: impl Fn(f64, f64) -> f64 + Sync,
) -> (ComplexField, f64) {
    let p_in = amp.grid().p_max();
    // image of the source band [−P, P)
    let lo = boost_momentum_map(params, -p_in, theta);
    let hi = boost_momentum_map(params, p_in, theta);
    let q: Vec<f64> = out.momenta().iter().map(|&p| boost_momentum_map(params, p, -theta)).collect();
    let psi = amp.dtft(&q);
    let mut kept = 0.0;
    let dp = out.dp();
    let vals: Vec<Complex64> = out
        .momenta()
        .iter()
        .zip(&q)
        .zip(&psi)
        .map(|((&p, &qq), &v)| {
            // share of this momentum cell inside the band
            let frac = (((p + 0.5 * dp).min(hi) - (p - 0.5 * dp).max(lo)) / dp).clamp(0.0, 1.0);
            if frac == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // dq = (ω(q)/ω(p)) dp
            kept += frac * v.norm_sqr() * omega(params, qq) / omega(params, p) * dp;
            v * (weight(p, qq) * frac.sqrt())
        })
        .collect();
    let total = amp.l2_norm().powi(2);
    let lost = if total > 0.0 { (1.0 - kept / total).max(0.0) } else { 0.0 };
    (inverse_transform(&Spectrum::from_raw(out.clone(), vals)), lost)
}

/// Newton-Wigner boost on an automatically sized output grid.
pub fn boost_nw(pkt: &WavePacket, b: &BoostParams) -> Result<WavePacket> {
    pkt.expect(Yardstick::NewtonWigner)?;
    if b.theta == 0.0 {
        return Ok(pkt.clone());
    }
    let out = boost_output_grid(pkt.grid(), b.theta)?;
    boost_nw_on(pkt, b, &out)
}

/// Newton-Wigner boost sampled on an explicit output grid.
pub fn boost_nw_on(pkt: &WavePacket, b: &BoostParams, out: &Arc<SpatialGrid>) -> Result<WavePacket> {
    pkt.expect(Yardstick::NewtonWigner)?;
    let pr = *pkt.params();
    let (amp, lost) = remap(pkt.amplitude(), &pr, b.theta, out, |p, q| (omega(&pr, q) / omega(&pr, p)).sqrt());
    if lost > MAX_LOST_MASS {
        return Err(Error::SpectralOverflow { lost });
    }
    Ok(WavePacket::from_parts(Yardstick::NewtonWigner, amp, pr))
}

/// Field-yardstick boost: the evolved field amplitude evaluated at the
/// Lorentz-mapped point `(z coshθ, (z/c) sinhθ)` by direct summation over the
/// grid momenta. Points outside `window` are left at zero.
pub fn boost_field(pkt: &WavePacket, b: &BoostParams, window: Option<(f64, f64)>) -> Result<WavePacket> {
    pkt.expect(Yardstick::Field)?;
    if b.theta == 0.0 {
        return Ok(pkt.clone());
    }
    let pr = *pkt.params();
    let grid = pkt.grid().clone();
    let spec = forward_transform(pkt.amplitude());
    check_window_mass(&spec, &pr, b.theta)?;
    let map = LorentzMap::new(b.theta, pr.c).inverse();
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let vals: Vec<Complex64> = grid
        .positions()
        .par_iter()
        .map(|&z| {
            if z < lo || z > hi {
                return Complex64::new(0.0, 0.0);
            }
            let (zp, tp) = map.apply(z, 0.0);
            spec.synthesize_at(zp, |p| omega(&pr, p) * tp)
        })
        .collect();
    let amp = ComplexField::new(grid, vals)?;
    Ok(WavePacket::from_parts(Yardstick::Field, amp, pr))
}

/// The same field-yardstick boost computed as a momentum remap with weight
/// `ω(q)/ω(p)` on `out`.
pub fn boost_field_spectral(pkt: &WavePacket, b: &BoostParams, out: &Arc<SpatialGrid>) -> Result<WavePacket> {
    pkt.expect(Yardstick::Field)?;
    let pr = *pkt.params();
    let (amp, lost) = remap(pkt.amplitude(), &pr, b.theta, out, |p, q| omega(&pr, q) / omega(&pr, p));
    if lost > MAX_LOST_MASS {
        return Err(Error::SpectralOverflow { lost });
    }
    Ok(WavePacket::from_parts(Yardstick::Field, amp, pr))
}

// Share of the spectral mass allowed to alias when boosted momenta leave the grid window.
const MAX_FIELD_ALIAS: f64 = 1e-4;

fn check_window_mass(spec: &Spectrum, pr: &ModelParams, theta: f64) -> Result<()> {
    let pmax = spec.grid().p_max();
    let mut total = 0.0;
    let mut out = 0.0;
    for (&p, v) in spec.momenta().iter().zip(spec.values()) {
        let m = v.norm_sqr();
        total += m;
        let image = boost_momentum_map(pr, p, theta);
        if image < -pmax || image >= pmax {
            out += m;
        }
    }
    let lost = if total > 0.0 { out / total } else { 0.0 };
    if lost > MAX_FIELD_ALIAS {
        return Err(Error::SpectralOverflow { lost });
    }
    Ok(())
}

/// Density from applying the Lorentz formula to the Newton-Wigner amplitude,
/// `|ψ(z coshθ, (z/c) sinhθ)|²`, renormalized. Evaluated as a momentum remap
/// with the full Jacobian on the boost output grid.
pub fn naive_lorentz_density(pkt: &WavePacket, b: &BoostParams) -> Result<DensityProfile> {
    let out = if b.theta == 0.0 { pkt.grid().clone() } else { boost_output_grid(pkt.grid(), b.theta)? };
    naive_lorentz_density_on(pkt, b, &out)
}

pub fn naive_lorentz_density_on(pkt: &WavePacket, b: &BoostParams, out: &Arc<SpatialGrid>) -> Result<DensityProfile> {
    let pr = *pkt.params();
    let (amp, lost) = remap(pkt.amplitude(), &pr, b.theta, out, |p, q| omega(&pr, q) / omega(&pr, p));
    if lost > MAX_LOST_MASS {
        return Err(Error::SpectralOverflow { lost });
    }
    Ok(DensityProfile::new(out.clone(), amp.abs_sqr())?.normalized())
}

/// Time-independent approximation: `ρ(z coshθ)`, renormalized.
pub fn naive_lorentz_static(d: &DensityProfile, b: &BoostParams) -> Result<DensityProfile> {
    let g = d.grid().clone();
    let vals = g.positions().iter().map(|&z| d.interpolate(z * b.gamma)).collect();
    Ok(DensityProfile::new(g, vals)?.normalized())
}

/// `[z_L e^{θ}, z_L e^{−θ}, z_R e^{−θ}, z_R e^{θ}]`.
pub fn predicted_peaks(z_l: f64, z_r: f64, theta: f64) -> Result<[f64; 4]> {
    if !(z_l < z_r) {
        return Err(Error::InvalidParams(format!("need z_L < z_R, got {z_l} and {z_r}")));
    }
    let (e, ei) = (theta.exp(), (-theta).exp());
    Ok([z_l * e, z_l * ei, z_r * ei, z_r * e])
}

/// Dense samples `f_θ(z_i, z_j)` of the position-space boost kernel, so that
/// the boosted amplitude is `Σ_j dz f_θ(z_i, z_j) ψ(z_j)`.
pub fn kernel_f_theta(grid: &SpatialGrid, params: &ModelParams, b: &BoostParams) -> Result<DMatrix<Complex64>> {
    let n = grid.n_points();
    if n > 512 {
        return Err(Error::KernelTooLarge(n));
    }
    let z = grid.positions();
    let p = grid.momenta();
    let pmax = grid.p_max();
    let left = DMatrix::from_fn(n, n, |i, k| Complex64::from_polar(1.0, p[k] * z[i]));
    let right = DMatrix::from_fn(n, n, |k, j| {
        let q = boost_momentum_map(params, p[k], -b.theta);
        if q < -pmax || q >= pmax {
            return Complex64::new(0.0, 0.0);
        }
        let s = (omega(params, q) / omega(params, p[k])).sqrt();
        Complex64::from_polar(s, -q * z[j])
    });
    Ok((left * right) * Complex64::new(grid.dp() / (2.0 * PI), 0.0))
}
