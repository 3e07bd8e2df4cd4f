//! Uniform periodic grids and the symmetric Fourier convention.
//!
//! Forward: `f̂(p) = (2π)^{-1/2} ∫ f(z) e^{-ipz} dz`, sampled at the FFT-ordered
//! momenta `p_k = 2π k / (n dz)`. Both directions are scaled so that the
//! discrete Parseval identity `Σ|f|² dz = Σ|f̂|² dp` holds exactly.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub struct SpatialGrid {
    n: usize,
    z_min: f64,
    z_max: f64,
    dz: f64,
    z: Vec<f64>,
    p: Vec<f64>,
    // e^{-i p_k z_min}
    shift: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpatialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialGrid")
            .field("n", &self.n)
            .field("z_min", &self.z_min)
            .field("z_max", &self.z_max)
            .finish()
    }
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.z_min.to_bits() == other.z_min.to_bits()
            && self.z_max.to_bits() == other.z_max.to_bits()
    }
}

impl SpatialGrid {
    /// `n` must be even and at least 4; the domain is `[z_min, z_max)`.
    pub fn new(n: usize, z_min: f64, z_max: f64) -> Result<Arc<Self>> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n_points = {n} must be even and >= 4")));
        }
        if !(z_min.is_finite() && z_max.is_finite()) || z_max <= z_min {
            return Err(Error::InvalidGrid(format!("bounds [{z_min}, {z_max}) are not an interval")));
        }
        let dz = (z_max - z_min) / n as f64;
        let z = (0..n).map(|j| z_min + j as f64 * dz).collect();
        let dp = 2.0 * PI / (n as f64 * dz);
        let p: Vec<f64> = (0..n)
            .map(|k| {
                let k = if k < n / 2 { k as isize } else { k as isize - n as isize };
                k as f64 * dp
            })
            .collect();
        let shift = p.iter().map(|&pk| Complex64::from_polar(1.0, -pk * z_min)).collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        Ok(Arc::new(SpatialGrid { n, z_min, z_max, dz, z, p, shift, fft, ifft }))
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dz)
    }

    /// Nyquist momentum `π/dz`.
    pub fn p_max(&self) -> f64 {
        PI / self.dz
    }

    pub fn positions(&self) -> &[f64] {
        &self.z
    }

    /// Momenta in transform (FFT) order.
    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    /// Index of the grid point nearest to `z`, if it lies inside the domain.
    pub fn index_of(&self, z: f64) -> Option<usize> {
        let j = ((z - self.z_min) / self.dz).round();
        (j >= 0.0 && (j as usize) < self.n).then_some(j as usize)
    }

    /// Same domain with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Result<Arc<Self>> {
        SpatialGrid::new(self.n * factor, self.z_min, self.z_max)
    }

    /// Same spacing on a domain `factor` times as long, centred on the same midpoint.
    pub fn padded(&self, factor: usize) -> Result<Arc<Self>> {
        let mid = 0.5 * (self.z_min + self.z_max);
        let half = 0.5 * self.length() * factor as f64;
        SpatialGrid::new(self.n * factor, mid - half, mid + half)
    }

    pub(crate) fn fft_in_place(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
    }

    pub(crate) fn ifft_in_place(&self, buf: &mut [Complex64]) {
        self.ifft.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

pub(crate) fn same_grid(a: &Arc<SpatialGrid>, b: &Arc<SpatialGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn all_finite(v: &[Complex64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Complex samples on a position grid.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Arc<SpatialGrid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch { expected: grid.n, found: values.len() });
        }
        if !all_finite(&values) {
            return Err(Error::NonFinite("ComplexField::new"));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.n];
        ComplexField { grid, values }
    }

    pub fn from_fn(grid: Arc<SpatialGrid>, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let values = grid.z.iter().map(|&z| f(z)).collect();
        ComplexField::new(grid, values)
    }

    pub fn from_real_fn(grid: Arc<SpatialGrid>, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        ComplexField::from_fn(grid, |z| Complex64::new(f(z), 0.0))
    }

    pub(crate) fn from_raw(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n);
        ComplexField { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        ComplexField::from_raw(self.grid.clone(), self.values.iter().map(|v| v * a).collect())
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ComplexField::from_raw(self.grid.clone(), values))
    }

    pub fn mul_pointwise(&self, other: &ComplexField) -> Result<Self> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(ComplexField::from_raw(self.grid.clone(), values))
    }

    pub fn abs_sqr(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    /// Max-abs distance to another field on the same grid.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Relative L2 distance `‖self − other‖ / ‖other‖`.
    pub fn rel_l2_diff(&self, other: &ComplexField) -> f64 {
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    /// Continuous Fourier transform of the sampled field at arbitrary momenta,
    /// `(2π)^{-1/2} dz Σ_j f_j e^{-i q z_j}`. Only the nonzero support is summed.
    pub fn dtft(&self, q: &[f64]) -> Vec<Complex64> {
        let lo = self.values.iter().position(|v| *v != Complex64::new(0.0, 0.0));
        let Some(lo) = lo else {
            return vec![Complex64::new(0.0, 0.0); q.len()];
        };
        let hi = self.values.iter().rposition(|v| *v != Complex64::new(0.0, 0.0)).unwrap();
        let support = &self.values[lo..=hi];
        let z0 = self.grid.z[lo];
        let dz = self.grid.dz;
        let pref = dz / (2.0 * PI).sqrt();
        q.par_iter()
            .map(|&qq| {
                // Phase recurrence, reseeded every 64 steps to bound drift.
                let step = Complex64::from_polar(1.0, -qq * dz);
                let mut acc = Complex64::new(0.0, 0.0);
                for (b, chunk) in support.chunks(64).enumerate() {
                    let mut ph = Complex64::from_polar(1.0, -qq * (z0 + (b * 64) as f64 * dz));
                    for v in chunk {
                        acc += v * ph;
                        ph *= step;
                    }
                }
                acc * pref
            })
            .collect()
    }
}

/// Real samples on a position grid; used for signed quantities such as
/// density corrections.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Arc<SpatialGrid>,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch { expected: grid.n, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("RealField::new"));
        }
        Ok(RealField { grid, values })
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

    /// `∫|f| dz`.
    pub fn l1_norm(&self) -> f64 {
        self.grid.dz * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.dz * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Relative L2 distance `‖self − other‖ / ‖other‖`.
    pub fn rel_l2_diff(&self, other: &RealField) -> f64 {
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = other.values.iter().map(|b| b * b).sum();
        (num / den).sqrt()
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, z: f64) -> Option<f64> {
        let x = (z - self.grid.z_min) / self.grid.dz;
        if x < 0.0 || x > (self.grid.n - 1) as f64 {
            return None;
        }
        let i = (x.floor() as usize).min(self.grid.n - 2);
        let f = x - i as f64;
        Some(self.values[i] * (1.0 - f) + self.values[i + 1] * f)
    }
}

/// Momentum-side samples, in the grid's transform order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<SpatialGrid>,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch { expected: grid.n, found: values.len() });
        }
        if !all_finite(&values) {
            return Err(Error::NonFinite("Spectrum::new"));
        }
        Ok(Spectrum { grid, values })
    }

    pub(crate) fn from_raw(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Self {
        Spectrum { grid, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn momenta(&self) -> &[f64] {
        &self.grid.p
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dp()).sqrt()
    }

    /// Multiply each sample by `f(p)`.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.grid.p.iter().zip(&self.values).map(|(&p, &v)| f(p, v)).collect();
        Spectrum::from_raw(self.grid.clone(), values)
    }

    /// Evaluate `(2π)^{-1/2} Σ_k dp ĝ(p_k) e^{i(p_k z − φ_k)}` at an arbitrary point.
    pub fn synthesize_at(&self, z: f64, phase: impl Fn(f64) -> f64) -> Complex64 {
        let dp = self.grid.dp();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&p, v) in self.grid.p.iter().zip(&self.values) {
            acc += v * Complex64::from_polar(1.0, p * z - phase(p));
        }
        acc * dp / (2.0 * PI).sqrt()
    }
}

type MultiplierFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A pure function of momentum applied diagonally in Fourier space.
#[derive(Clone)]
pub struct SpectralMultiplier {
    tag: String,
    f: Arc<MultiplierFn>,
}

impl fmt::Debug for SpectralMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpectralMultiplier({})", self.tag)
    }
}

impl SpectralMultiplier {
    pub fn new(tag: impl Into<String>, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        SpectralMultiplier { tag: tag.into(), f: Arc::new(f) }
    }

    pub fn real(tag: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SpectralMultiplier::new(tag, move |p| Complex64::new(f(p), 0.0))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn eval(&self, p: f64) -> Complex64 {
        (self.f)(p)
    }

    /// Samples on the grid momenta; fails if any sample is not finite.
    pub fn sample(&self, grid: &SpatialGrid) -> Result<Vec<Complex64>> {
        grid.p
            .iter()
            .map(|&p| {
                let v = self.eval(p);
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteMultiplier { tag: self.tag.clone(), p })
                }
            })
            .collect()
    }
}

pub fn forward_transform(f: &ComplexField) -> Spectrum {
    let g = &f.grid;
    let mut buf = f.values.clone();
    g.fft_in_place(&mut buf);
    let pref = g.dz / (2.0 * PI).sqrt();
    buf.iter_mut().zip(&g.shift).for_each(|(v, s)| *v *= s * pref);
    Spectrum::from_raw(g.clone(), buf)
}

pub fn inverse_transform(s: &Spectrum) -> ComplexField {
    let g = &s.grid;
    let pref = (2.0 * PI).sqrt() / g.dz;
    let mut buf: Vec<Complex64> = s.values.iter().zip(&g.shift).map(|(v, sh)| v * sh.conj() * pref).collect();
    g.ifft_in_place(&mut buf);
    ComplexField::from_raw(g.clone(), buf)
}

/// `IFFT(m · FFT(f))` with precomputed multiplier samples in transform order.
pub(crate) fn apply_sampled(f: &ComplexField, m: &[Complex64]) -> ComplexField {
    let g = &f.grid;
    let mut buf = f.values.clone();
    g.fft_in_place(&mut buf);
    buf.iter_mut().zip(m).for_each(|(v, w)| *v *= w);
    g.ifft_in_place(&mut buf);
    ComplexField::from_raw(g.clone(), buf)
}

pub fn apply_multiplier(f: &ComplexField, m: &SpectralMultiplier) -> Result<ComplexField> {
    let samples = m.sample(&f.grid)?;
    let out = apply_sampled(f, &samples);
    if !all_finite(&out.values) {
        return Err(Error::NonFinite("apply_multiplier"));
    }
    Ok(out)
}

/// Periodic `Σ_j f(z_j) k(z_i − z_j) dz` by direct summation.
///
/// The kernel is indexed by displacement: `kernel[m]` holds `k(m·dz)`, with
/// indices above `n/2` wrapping to negative displacements.
pub fn direct_convolve_oracle(f: &ComplexField, kernel: &ComplexField) -> Result<ComplexField> {
    if !same_grid(&f.grid, &kernel.grid) {
        return Err(Error::GridMismatch);
    }
    let n = f.grid.n;
    let dz = f.grid.dz;
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += f.values[j] * kernel.values[(i + n - j) % n];
            }
            acc * dz
        })
        .collect();
    Ok(ComplexField::from_raw(f.grid.clone(), values))
}

/// `dz · Σ f_j`.
pub fn integrate(grid: &SpatialGrid, f: &[f64]) -> f64 {
    grid.dz * f.iter().sum::<f64>()
}

pub fn l2_norm(f: &ComplexField) -> f64 {
    (f.grid.dz * f.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}
