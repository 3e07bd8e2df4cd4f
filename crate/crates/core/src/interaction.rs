//! Short-time expansion of the two-particle Newton-Wigner density,
//! `ρ(z, t) = ρ₀(z) + r_free(z) t² + λ r_int(z) t² + O(t³)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dispersion::{multiplier_evolution, multiplier_i_plus, multiplier_v1, omega, ModelParams};
use crate::error::{Error, Result};
use crate::fock::oracle_coefficients;
use crate::grid::{apply_multiplier, apply_sampled, forward_transform, ComplexField, RealField, SpatialGrid};
use crate::states::{DensityProfile, PacketShape};

const MAX_OVERLAP: f64 = 1e-6;
const MAX_PROJECTION_LOSS: f64 = 0.01;
pub const MAX_CUTOFF_CHANGE: f64 = 0.01;

/// Two Gaussian packets `G(z − x)` and `G(z − y)` with `G(z) ∝ exp(−z²/w²)`.
/// An optional momentum `kick` multiplies the first packet by `e^{ikz}` and the
/// second by `e^{−ikz}`.
#[derive(Clone, Debug)]
pub struct TwoParticleConfig {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub kick: f64,
    params: ModelParams,
    grid: Arc<SpatialGrid>,
    gx: ComplexField,
    gy: ComplexField,
}

impl TwoParticleConfig {
    pub fn new(w: f64, x: f64, y: f64, params: ModelParams, grid: Arc<SpatialGrid>) -> Result<Self> {
        TwoParticleConfig::with_kick(w, x, y, 0.0, params, grid)
    }

    pub fn with_kick(w: f64, x: f64, y: f64, kick: f64, params: ModelParams, grid: Arc<SpatialGrid>) -> Result<Self> {
        params.validate()?;
        if !(w > 0.0 && w.is_finite() && x.is_finite() && y.is_finite() && kick.is_finite()) {
            return Err(Error::InvalidParams(format!("w = {w}, x = {x}, y = {y}, kick = {kick}")));
        }
        for u in [x, y] {
            if u - 5.0 * w < grid.z_min() || u + 5.0 * w > grid.z_max() {
                return Err(Error::ShapeOutOfDomain(format!(
                    "packet at {u} with width {w} needs a 5w margin inside [{}, {})",
                    grid.z_min(),
                    grid.z_max()
                )));
            }
        }
        // Share of the continuum norm captured by the samples.
        let amp = (2.0 / (std::f64::consts::PI * w * w)).powf(0.25);
        let kept: f64 = grid.positions().iter().map(|&z| amp * amp * (-2.0 * (z - x).powi(2) / (w * w)).exp()).sum::<f64>()
            * grid.dz();
        if (kept - 1.0).abs() > MAX_PROJECTION_LOSS {
            return Err(Error::ProjectionLoss { kept });
        }
        let make = |u: f64, k: f64| -> Result<ComplexField> {
            let g = PacketShape::gaussian(w, u).sample_normalized(&grid)?;
            if k == 0.0 {
                return Ok(g);
            }
            g.mul_pointwise(&ComplexField::from_fn(grid.clone(), |z| Complex64::from_polar(1.0, k * z))?)
        };
        let gx = make(x, kick)?;
        let gy = make(y, -kick)?;
        let ov: Complex64 = gx.values().iter().zip(gy.values()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.dz();
        if ov.norm() >= MAX_OVERLAP {
            return Err(Error::Overlap(ov.norm()));
        }
        Ok(TwoParticleConfig { w, x, y, kick, params, grid, gx, gy })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// The packet amplitudes `(G_x, G_y)`.
    pub fn packets(&self) -> (&ComplexField, &ComplexField) {
        (&self.gx, &self.gy)
    }

    /// Same packets on a grid with `factor` times the resolution.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        TwoParticleConfig::with_kick(self.w, self.x, self.y, self.kick, self.params, self.grid.refined(factor)?)
    }

    fn is_real(&self) -> bool {
        self.kick == 0.0
    }

    /// Root-mean-square `ω(p)` over both packets.
    pub fn characteristic_energy(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for g in [&self.gx, &self.gy] {
            let s = forward_transform(g);
            for (&p, v) in s.momenta().iter().zip(s.values()) {
                let m = v.norm_sqr();
                num += m * omega(&self.params, p).powi(2);
                den += m;
            }
        }
        (num / den).sqrt()
    }
}

/// `|G_x|² + |G_y|²`, integrating to 2.
pub fn initial_density(cfg: &TwoParticleConfig) -> DensityProfile {
    let v = cfg.gx.values().iter().zip(cfg.gy.values()).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    DensityProfile::new(cfg.grid.clone(), v).expect("finite packets give a finite density")
}

fn free_density_at(cfg: &TwoParticleConfig, t: f64) -> Result<Vec<f64>> {
    let m = multiplier_evolution(&cfg.params, t);
    let a = apply_multiplier(&cfg.gx, &m)?;
    let b = apply_multiplier(&cfg.gy, &m)?;
    Ok(a.values().iter().zip(b.values()).map(|(u, v)| u.norm_sqr() + v.norm_sqr()).collect())
}

/// Free second-order coefficient, `½ d²ρ/dt²` at `t = 0`, from exact spectral
/// evolution by central differences with `E_char h = 10⁻³` and one Richardson step.
pub fn r_free_quadratic(cfg: &TwoParticleConfig) -> Result<RealField> {
    let h = 1e-3 / cfg.characteristic_energy();
    let r0 = free_density_at(cfg, 0.0)?;
    let second = |h: f64| -> Result<Vec<f64>> {
        let p = free_density_at(cfg, h)?;
        let m = free_density_at(cfg, -h)?;
        Ok(p.iter().zip(&m).zip(&r0).map(|((a, b), c)| (a - 2.0 * c + b) / (2.0 * h * h)).collect())
    };
    let d1 = second(h)?;
    let d2 = second(0.5 * h)?;
    let v = d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    RealField::new(cfg.grid.clone(), v)
}

/// The two groups of convolution chains whose combination gives `r_int`.
#[derive(Clone, Debug)]
pub struct InteractionTerms {
    /// Cross term `⟨Ĥ₀ n̂(z) V̂⟩` without its numeric prefactor.
    pub t7: RealField,
    /// Symmetrized term `⟨(V̂Ĥ₀ + Ĥ₀V̂) n̂(z)⟩ + c.c.` without its prefactor.
    pub t8: RealField,
}

/// Prefactor of [`InteractionTerms::t7`] in `⟨Ĥ₀ n̂ V̂⟩`.
pub const T7_PREFACTOR: f64 = 24.0;
/// Prefactor of [`InteractionTerms::t8`].
pub const T8_PREFACTOR: f64 = 48.0;

/// Evaluates both term groups with one-dimensional spectral convolutions.
/// Requires real packets.
pub fn interaction_terms(cfg: &TwoParticleConfig) -> Result<InteractionTerms> {
    if !cfg.is_real() {
        return Err(Error::InvalidParams("the interaction chains assume real packet amplitudes".into()));
    }
    let g = &*cfg.grid;
    let mu = multiplier_i_plus(&cfg.params).sample(g)?;
    let om = multiplier_v1(&cfg.params).sample(g)?;
    let muom: Vec<Complex64> = mu.iter().zip(&om).map(|(a, b)| a * b).collect();
    let i = |f: &ComplexField| apply_sampled(f, &mu);
    let h = |f: &ComplexField| apply_sampled(f, &om);
    let hi = |f: &ComplexField| apply_sampled(f, &muom);
    let mul = |a: &ComplexField, b: &ComplexField| a.mul_pointwise(b).expect("same grid");

    let (gx, gy) = (&cfg.gx, &cfg.gy);
    let (hgx, hgy) = (h(gx), h(gy));
    let (ax, ay) = (i(gx), i(gy));
    let (bx, by) = (i(&hgx), i(&hgy));
    let s = mul(&ax, &ay);

    let terms7 = [
        mul(gx, &i(&mul(&s, &by))),
        mul(gy, &i(&mul(&s, &bx))),
        mul(&hgy, &i(&mul(&s, &ax))),
        mul(&hgx, &i(&mul(&s, &ay))),
    ];
    let terms8 = [
        mul(gx, &i(&mul(&mul(&bx, &ay), &ay))),
        mul(gy, &i(&mul(&mul(&bx, &ay), &ax))),
        mul(gx, &i(&mul(&mul(&by, &ax), &ay))),
        mul(gy, &i(&mul(&mul(&by, &ax), &ax))),
        mul(gx, &i(&mul(&s, &by))),
        mul(gx, &hi(&mul(&s, &ay))),
        mul(gy, &i(&mul(&s, &bx))),
        mul(gy, &hi(&mul(&s, &ax))),
    ];
    let sum = |ts: &[ComplexField]| -> Result<RealField> {
        let v = (0..g.n_points()).map(|k| ts.iter().map(|t| t.values()[k].re).sum()).collect();
        RealField::new(cfg.grid.clone(), v)
    };
    Ok(InteractionTerms { t7: sum(&terms7)?, t8: sum(&terms8)? })
}

/// `r_int` per unit coupling on the configuration's own grid.
pub fn r_int_unguarded(cfg: &TwoParticleConfig) -> Result<RealField> {
    let t = interaction_terms(cfg)?;
    let v = t
        .t7
        .values()
        .iter()
        .zip(t.t8.values())
        .map(|(a, b)| 2.0 * T7_PREFACTOR * a - 0.5 * T8_PREFACTOR * b)
        .collect();
    RealField::new(cfg.grid.clone(), v)
}

/// Relative L2 change of `r_int` when the momentum cutoff is doubled.
pub fn cutoff_sensitivity(cfg: &TwoParticleConfig) -> Result<f64> {
    let a = r_int_unguarded(cfg)?;
    let b = r_int_unguarded(&cfg.refined(2)?)?;
    let coarse: Vec<f64> = b.values().iter().step_by(2).copied().collect();
    let b = RealField::new(cfg.grid.clone(), coarse)?;
    Ok(a.rel_l2_diff(&b))
}

/// `r_int` per unit coupling, rejected if it is not stable under doubling the cutoff.
pub fn r_int(cfg: &TwoParticleConfig) -> Result<RealField> {
    let change = cutoff_sensitivity(cfg)?;
    if change > MAX_CUTOFF_CHANGE {
        return Err(Error::CutoffInstability(change));
    }
    r_int_unguarded(cfg)
}

#[derive(Clone, Debug)]
pub struct ShortTimeDensity {
    pub t: f64,
    pub rho0: DensityProfile,
    pub r_free: RealField,
    /// Per unit coupling.
    pub r_int: RealField,
    /// `ρ₀ + t² r_free + λ t² r_int`; may dip below zero outside the validity range.
    pub rho: RealField,
    pub characteristic_energy: f64,
    /// False when `t · E_char > 0.1`.
    pub valid: bool,
    /// `∫ρ dz − 2`.
    pub norm_defect: f64,
}

pub fn short_time_density(cfg: &TwoParticleConfig, t: f64) -> Result<ShortTimeDensity> {
    let rho0 = initial_density(cfg);
    let r_free = r_free_quadratic(cfg)?;
    let r_int = r_int(cfg)?;
    let lam = cfg.params.lambda;
    let v: Vec<f64> = (0..cfg.grid.n_points())
        .map(|k| rho0.values()[k] + t * t * (r_free.values()[k] + lam * r_int.values()[k]))
        .collect();
    let rho = RealField::new(cfg.grid.clone(), v)?;
    let e = cfg.characteristic_energy();
    let norm_defect = rho.integral() - 2.0;
    Ok(ShortTimeDensity {
        t,
        rho0,
        r_free,
        r_int,
        rho,
        characteristic_energy: e,
        valid: t.abs() * e <= 0.1,
        norm_defect,
    })
}

/// `∫|f(c+s) − f(c−s)| ds / ∫|f(c+s) + f(c−s)| ds` over `0 ≤ s ≤ window`.
pub fn asymmetry_metric(f: &RealField, center: f64, window: f64) -> Result<f64> {
    let g = f.grid();
    let last = g.positions()[g.n_points() - 1];
    if window <= 0.0 || center - window < g.z_min() || center + window > last {
        return Err(Error::InvalidParams(format!("window {center} ± {window} leaves the grid")));
    }
    let steps = (window / g.dz()).floor() as usize;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..=steps {
        let s = k as f64 * g.dz();
        let a = f.interpolate(center + s).unwrap_or(0.0);
        let b = f.interpolate(center - s).unwrap_or(0.0);
        num += (a - b).abs();
        den += (a + b).abs();
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// First-order-in-time coefficients `(r⁽¹⁾_free, r⁽¹⁾_int)` from the Fock-space oracle.
/// Requires a coarse grid (at most 48 points).
pub fn linear_terms_check(cfg: &TwoParticleConfig) -> Result<(RealField, RealField)> {
    let c = oracle_coefficients(cfg)?;
    Ok((c.r1_free, c.r1_int))
}
