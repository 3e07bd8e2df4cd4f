//! Dispersion relation, convolution kernels and the boost momentum map.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, SpatialGrid, SpectralMultiplier};

/// Mass, light speed and quartic coupling in atomic units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub c: f64,
    pub lambda: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { m: 1.0, c: 137.0, lambda: 1.0 }
    }
}

impl ModelParams {
    pub fn new(m: f64, c: f64, lambda: f64) -> Result<Self> {
        let p = ModelParams { m, c, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParams(format!("light speed must be positive, got {}", self.c)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParams("coupling must be finite".into()));
        }
        Ok(())
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// Reduced Compton wavelength `1/(mc)`.
    pub fn compton_length(&self) -> f64 {
        1.0 / (self.m * self.c)
    }

    pub fn omega(&self, p: f64) -> f64 {
        omega(self, p)
    }
}

/// `ω(p) = √(m²c⁴ + c²p²)`.
pub fn omega(params: &ModelParams, p: f64) -> f64 {
    let mc2 = params.rest_energy();
    (mc2 * mc2 + params.c * params.c * p * p).sqrt()
}

/// `c / √(2ω)`: the smoothing kernel `I₊`.
pub fn multiplier_i_plus(params: &ModelParams) -> SpectralMultiplier {
    let pr = *params;
    SpectralMultiplier::real("I+", move |p| pr.c / (2.0 * omega(&pr, p)).sqrt())
}

/// `√ω / (√2 c)`: the kernel `I₋`, divergent in position space.
pub fn multiplier_i_minus(params: &ModelParams) -> SpectralMultiplier {
    let pr = *params;
    SpectralMultiplier::real("I-", move |p| omega(&pr, p).sqrt() / (2f64.sqrt() * pr.c))
}

/// `ω(p)`: the one-body kernel of the free Hamiltonian.
pub fn multiplier_v1(params: &ModelParams) -> SpectralMultiplier {
    let pr = *params;
    SpectralMultiplier::real("V1", move |p| omega(&pr, p))
}

/// `√(mc²/ω)`: Newton-Wigner amplitude to field amplitude.
pub fn multiplier_nw_to_field(params: &ModelParams) -> SpectralMultiplier {
    let pr = *params;
    SpectralMultiplier::real("M", move |p| (pr.rest_energy() / omega(&pr, p)).sqrt())
}

/// `e^{-iω(p)t}`.
pub fn multiplier_evolution(params: &ModelParams, t: f64) -> SpectralMultiplier {
    let pr = *params;
    SpectralMultiplier::new(format!("exp(-i w t), t={t}"), move |p| {
        Complex64::from_polar(1.0, -omega(&pr, p) * t)
    })
}

/// Real-space samples of a kernel, `K(s) = (2π)^{-1} ∫ m(p) e^{ips} dp`,
/// indexed by displacement: entry `j` is `K(j·dz)` for `j < n/2` and
/// `K((j−n)·dz)` above.
#[derive(Clone, Debug)]
pub struct KernelTable {
    samples: ComplexField,
    multiplier: SpectralMultiplier,
    singular: bool,
}

impl KernelTable {
    pub fn new(grid: Arc<SpatialGrid>, multiplier: SpectralMultiplier, singular: bool) -> Result<Self> {
        let mut buf = multiplier.sample(&grid)?;
        grid.ifft_in_place(&mut buf);
        let inv_dz = 1.0 / grid.dz();
        let values: Vec<Complex64> = buf.into_iter().map(|v| v * inv_dz).collect();
        let samples = ComplexField::new(grid, values)?;
        Ok(KernelTable { samples, multiplier, singular })
    }

    pub fn i_plus(grid: Arc<SpatialGrid>, params: &ModelParams) -> Result<Self> {
        KernelTable::new(grid, multiplier_i_plus(params), false)
    }

    pub fn i_minus(grid: Arc<SpatialGrid>, params: &ModelParams) -> Result<Self> {
        KernelTable::new(grid, multiplier_i_minus(params), true)
    }

    pub fn v1(grid: Arc<SpatialGrid>, params: &ModelParams) -> Result<Self> {
        KernelTable::new(grid, multiplier_v1(params), true)
    }

    /// Samples in displacement order, usable with `direct_convolve_oracle`.
    pub fn samples(&self) -> &ComplexField {
        &self.samples
    }

    pub fn multiplier(&self) -> &SpectralMultiplier {
        &self.multiplier
    }

    /// True when the continuum kernel has no pointwise meaning and the table
    /// depends on the grid cutoff.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Signed displacement of each sample.
    pub fn displacements(&self) -> Vec<f64> {
        let g = self.samples.grid();
        let n = g.n_points();
        (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * g.dz())
            .collect()
    }

    /// `(s, K(s))` pairs sorted by displacement.
    pub fn centered(&self) -> Vec<(f64, Complex64)> {
        let n = self.samples.grid().n_points();
        let d = self.displacements();
        (0..n).map(|i| (i + n / 2) % n).map(|j| (d[j], self.samples.values()[j])).collect()
    }
}

/// `p(θ) = p coshθ − (ω(p)/c) sinhθ`.
pub fn boost_momentum_map(params: &ModelParams, p: f64, theta: f64) -> f64 {
    p * theta.cosh() - omega(params, p) / params.c * theta.sinh()
}

/// `dp(θ)/dp = coshθ − (cp/ω) sinhθ`, which equals `ω(p(θ))/ω(p)`.
pub fn boost_jacobian(params: &ModelParams, p: f64, theta: f64) -> f64 {
    theta.cosh() - params.c * p / omega(params, p) * theta.sinh()
}

/// `artanh(v/c)`.
pub fn rapidity(params: &ModelParams, v: f64) -> Result<f64> {
    if !(v.abs() < params.c) {
        return Err(Error::InvalidParams(format!("|v| = {} must be below c = {}", v.abs(), params.c)));
    }
    Ok((v / params.c).atanh())
}
