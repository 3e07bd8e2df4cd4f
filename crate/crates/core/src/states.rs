//! Single-particle wave packets, yardstick conversion and densities.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{multiplier_nw_to_field, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, forward_transform, integrate, ComplexField, SpatialGrid, SpectralMultiplier, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Yardstick {
    /// Newton-Wigner position yardstick.
    #[serde(rename = "NW")]
    NewtonWigner,
    /// Field-operator position yardstick.
    #[serde(rename = "FIELD")]
    Field,
}

impl Yardstick {
    pub fn label(self) -> &'static str {
        match self {
            Yardstick::NewtonWigner => "NW",
            Yardstick::Field => "FIELD",
        }
    }
}

impl fmt::Display for Yardstick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    /// Flat amplitude on `|z − center| < w`.
    Box,
    /// `exp(−(z − center)²/w²)`.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketShape {
    pub kind: ShapeKind,
    pub w: f64,
    pub center: f64,
}

impl PacketShape {
    pub fn boxed(w: f64, center: f64) -> Self {
        PacketShape { kind: ShapeKind::Box, w, center }
    }

    pub fn gaussian(w: f64, center: f64) -> Self {
        PacketShape { kind: ShapeKind::Gaussian, w, center }
    }

    /// Unnormalized amplitude. Box edges take the value 1/2 when they fall on
    /// a sample (to within `edge_tol`).
    pub fn profile(&self, z: f64, edge_tol: f64) -> f64 {
        let s = z - self.center;
        match self.kind {
            ShapeKind::Box => {
                let d = self.w - s.abs();
                if d.abs() <= edge_tol {
                    0.5
                } else if d > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeKind::Gaussian => (-(s * s) / (self.w * self.w)).exp(),
        }
    }

    /// Checks width and boundary margin on `grid`.
    pub fn validate_on(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.w.is_finite() && self.w > 0.0) || !self.center.is_finite() {
            return Err(Error::ShapeOutOfDomain(format!("width {} / center {} invalid", self.w, self.center)));
        }
        if self.w < 4.0 * grid.dz() {
            return Err(Error::ShapeOutOfDomain(format!(
                "w = {} is below 4 dz = {}",
                self.w,
                4.0 * grid.dz()
            )));
        }
        let lo = self.center - 6.0 * self.w;
        let hi = self.center + 6.0 * self.w;
        if lo < grid.z_min() || hi > grid.z_max() {
            return Err(Error::ShapeOutOfDomain(format!(
                "[{lo}, {hi}] (shape plus 5w margin) exceeds the grid [{}, {})",
                grid.z_min(),
                grid.z_max()
            )));
        }
        Ok(())
    }

    /// Unit-norm samples of the shape on `grid`, without margin checks.
    pub fn sample_normalized(&self, grid: &Arc<SpatialGrid>) -> Result<ComplexField> {
        let tol = 1e-6 * grid.dz();
        let f = ComplexField::from_real_fn(grid.clone(), |z| self.profile(z, tol))?;
        let n = f.l2_norm();
        if n == 0.0 {
            return Err(Error::ShapeOutOfDomain("shape has no samples on the grid".into()));
        }
        Ok(f.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// A single-particle state given by its position amplitude in one yardstick.
#[derive(Clone, Debug)]
pub struct WavePacket {
    yardstick: Yardstick,
    amplitude: ComplexField,
    params: ModelParams,
    display_scale: f64,
}

impl WavePacket {
    /// Wraps an amplitude. NW amplitudes must be unit-normalized.
    pub fn new(yardstick: Yardstick, amplitude: ComplexField, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let n2 = amplitude.l2_norm().powi(2);
        if yardstick == Yardstick::NewtonWigner && (n2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n2));
        }
        Ok(WavePacket::from_parts(yardstick, amplitude, params))
    }

    pub(crate) fn from_parts(yardstick: Yardstick, amplitude: ComplexField, params: ModelParams) -> Self {
        let n2 = amplitude.l2_norm().powi(2);
        let display_scale = if n2 > 0.0 { 1.0 / n2 } else { 1.0 };
        WavePacket { yardstick, amplitude, params, display_scale }
    }

    pub fn yardstick(&self) -> Yardstick {
        self.yardstick
    }

    pub fn amplitude(&self) -> &ComplexField {
        &self.amplitude
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        self.amplitude.grid()
    }

    /// `∫|amplitude|² dz`.
    pub fn raw_norm(&self) -> f64 {
        self.amplitude.l2_norm().powi(2)
    }

    /// Factor that brings the density to unit integral.
    pub fn display_scale(&self) -> f64 {
        self.display_scale
    }

    pub fn spectrum(&self) -> Spectrum {
        forward_transform(&self.amplitude)
    }

    pub fn expect(&self, y: Yardstick) -> Result<()> {
        if self.yardstick != y {
            return Err(Error::WrongYardstick { expected: y.label(), found: self.yardstick.label() });
        }
        Ok(())
    }

    pub(crate) fn with_amplitude(&self, amplitude: ComplexField) -> Self {
        WavePacket::from_parts(self.yardstick, amplitude, self.params)
    }
}

/// Unit-norm Newton-Wigner packet of the given shape.
pub fn make_packet(shape: &PacketShape, grid: &Arc<SpatialGrid>, params: &ModelParams) -> Result<WavePacket> {
    params.validate()?;
    shape.validate_on(grid)?;
    let amp = shape.sample_normalized(grid)?;
    Ok(WavePacket::from_parts(Yardstick::NewtonWigner, amp, *params))
}

pub fn convert_yardstick(pkt: &WavePacket, target: Yardstick) -> Result<WavePacket> {
    let pr = pkt.params;
    let m = match (pkt.yardstick, target) {
        (a, b) if a == b => return Ok(pkt.clone()),
        (Yardstick::NewtonWigner, Yardstick::Field) => multiplier_nw_to_field(&pr),
        _ => SpectralMultiplier::real("1/M", move |p| (pr.omega(p) / pr.rest_energy()).sqrt()),
    };
    let amp = apply_multiplier(&pkt.amplitude, &m)?;
    Ok(WavePacket::from_parts(target, amp, pr))
}

/// Nonnegative density samples with the integral recorded before any rescaling.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    grid: Arc<SpatialGrid>,
    values: Vec<f64>,
    raw_integral: f64,
    normalized: bool,
}

impl DensityProfile {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch { expected: grid.n_points(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("DensityProfile::new"));
        }
        let raw_integral = integrate(&grid, &values);
        Ok(DensityProfile { grid, values, raw_integral, normalized: false })
    }

    /// Rescaled copy with unit integral.
    pub fn normalized(&self) -> Self {
        let s = if self.integral() > 0.0 { 1.0 / self.integral() } else { 1.0 };
        DensityProfile {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            raw_integral: self.raw_integral,
            normalized: true,
        }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        integrate(&self.grid, &self.values)
    }

    /// Integral of the density before normalization.
    pub fn raw_integral(&self) -> f64 {
        self.raw_integral
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn mean(&self) -> f64 {
        let z = self.grid.positions();
        self.values.iter().zip(z).map(|(r, z)| r * z).sum::<f64>() * self.grid.dz() / self.integral()
    }

    pub fn std_dev(&self) -> f64 {
        let mu = self.mean();
        let z = self.grid.positions();
        let var = self.values.iter().zip(z).map(|(r, z)| r * (z - mu).powi(2)).sum::<f64>() * self.grid.dz()
            / self.integral();
        var.sqrt()
    }

    /// `∫|a − b| dz`.
    pub fn l1_distance(&self, other: &DensityProfile) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.dz()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, z: f64) -> f64 {
        let g = &self.grid;
        let x = (z - g.z_min()) / g.dz();
        if x < 0.0 || x > (g.n_points() - 1) as f64 {
            return 0.0;
        }
        let i = x.floor() as usize;
        let f = x - i as f64;
        if i + 1 >= g.n_points() {
            return self.values[i];
        }
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

pub fn density(pkt: &WavePacket, normalize: bool) -> DensityProfile {
    let values = pkt.amplitude.abs_sqr();
    let raw_integral = integrate(pkt.grid(), &values);
    let d = DensityProfile { grid: pkt.grid().clone(), values, raw_integral, normalized: false };
    if normalize {
        d.normalized()
    } else {
        d
    }
}
