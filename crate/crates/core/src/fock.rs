//! Dense two-particle sector of the discretized Fock space.
//!
//! Modes are the grid sites with normalized ladder operators `b_i = √dz â(z_i)`,
//! so `[b_i, b_j†] = δ_ij` and `[â_i, â_j†] = δ_ij / dz`. Operators are built by
//! acting with ladder operators on occupation-number states, never from the
//! closed-form term chains used in [`crate::interaction`].

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dispersion::{omega, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{RealField, SpatialGrid};
use crate::interaction::TwoParticleConfig;

pub const MAX_MODES: usize = 48;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A superposition of occupation-number states. Each key lists the occupied
/// modes in ascending order, with repeats for multiple occupation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    terms: HashMap<Vec<u16>, Complex64>,
}

impl FockVector {
    pub fn vacuum() -> Self {
        let mut terms = HashMap::new();
        terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        FockVector { terms }
    }

    pub fn basis(modes: &[u16]) -> Self {
        let mut key = modes.to_vec();
        key.sort_unstable();
        let mut terms = HashMap::new();
        terms.insert(key, Complex64::new(1.0, 0.0));
        FockVector { terms }
    }

    pub fn coefficient(&self, modes: &[u16]) -> Complex64 {
        let mut key = modes.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u16>, &Complex64)> {
        self.terms.iter()
    }

    fn push(&mut self, key: Vec<u16>, c: Complex64) {
        *self.terms.entry(key).or_insert(ZERO) += c;
    }

    pub fn add_scaled(&mut self, other: &FockVector, a: Complex64) {
        for (k, c) in &other.terms {
            self.push(k.clone(), c * a);
        }
    }

    /// `b_mode`.
    pub fn annihilate(&self, mode: u16) -> FockVector {
        let mut out = FockVector::default();
        for (key, c) in &self.terms {
            let count = key.iter().filter(|&&m| m == mode).count();
            if count == 0 {
                continue;
            }
            let mut k = key.clone();
            let pos = k.iter().position(|&m| m == mode).unwrap();
            k.remove(pos);
            out.push(k, c * (count as f64).sqrt());
        }
        out
    }

    /// `b_mode†`.
    pub fn create(&self, mode: u16) -> FockVector {
        let mut out = FockVector::default();
        for (key, c) in &self.terms {
            let count = key.iter().filter(|&&m| m == mode).count();
            let mut k = key.clone();
            let pos = k.partition_point(|&m| m < mode);
            k.insert(pos, mode);
            out.push(k, c * ((count + 1) as f64).sqrt());
        }
        out
    }

    /// `Σ_i α_i b_i`.
    pub fn annihilate_combination(&self, alpha: &[f64]) -> FockVector {
        let mut out = FockVector::default();
        let mut occupied: Vec<u16> = self.terms.keys().flatten().copied().collect();
        occupied.sort_unstable();
        occupied.dedup();
        for m in occupied {
            if alpha[m as usize] != 0.0 {
                out.add_scaled(&self.annihilate(m), Complex64::new(alpha[m as usize], 0.0));
            }
        }
        out
    }
}

/// Symmetrized pair states `|i, j⟩`, `i ≤ j`, on a coarse grid.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n: usize,
    dz: f64,
    pairs: Vec<(u16, u16)>,
    index: HashMap<(u16, u16), usize>,
}

impl SectorBasis {
    pub fn new(grid: &SpatialGrid) -> Result<Self> {
        let n = grid.n_points();
        if n > MAX_MODES {
            return Err(Error::BasisTooLarge(n));
        }
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n as u16 {
            for j in i..n as u16 {
                pairs.push((i, j));
            }
        }
        let index = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Ok(SectorBasis { n, dz: grid.dz(), pairs, index })
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(u16, u16)] {
        &self.pairs
    }

    pub fn index_of(&self, i: u16, j: u16) -> Option<usize> {
        self.index.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn state(&self, k: usize) -> FockVector {
        let (i, j) = self.pairs[k];
        FockVector::basis(&[i, j])
    }

    /// Coefficients of a two-particle Fock vector in this basis.
    pub fn project(&self, v: &FockVector) -> DVector<Complex64> {
        let mut out = DVector::from_element(self.dim(), ZERO);
        for (key, c) in v.iter() {
            if let [i, j] = key[..] {
                out[self.index[&(i, j)]] += c;
            }
        }
        out
    }

    /// Coefficients of `(1/√2) ∬ Φ(z₁, z₂) â†(z₁) â†(z₂) |0⟩` for a symmetric `Φ`
    /// sampled as `phi[i * n + j]`.
    pub fn from_wavefunction(&self, phi: &[Complex64]) -> DVector<Complex64> {
        let n = self.n;
        DVector::from_iterator(
            self.dim(),
            self.pairs.iter().map(|&(i, j)| {
                let v = phi[i as usize * n + j as usize];
                if i == j {
                    v * self.dz
                } else {
                    v * (2f64.sqrt() * self.dz)
                }
            }),
        )
    }

    /// Occupation of mode `k` in each basis state.
    pub fn occupation(&self, k: usize) -> DVector<f64> {
        let k = k as u16;
        DVector::from_iterator(self.dim(), self.pairs.iter().map(|&(i, j)| ((i == k) as u8 + (j == k) as u8) as f64))
    }

    /// Expectation profile `⟨x| n̂(z_k) |y⟩` for every grid point.
    pub fn density_form(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n];
        for (s, &(i, j)) in self.pairs.iter().enumerate() {
            let v = x[s].conj() * y[s] / self.dz;
            out[i as usize] += v;
            out[j as usize] += v;
        }
        out
    }
}

/// A dense operator on the pair sector.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl OperatorMatrix {
    /// `max|A − A†| / max|A|` (zero for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.matrix;
        let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() < 1e-12
    }

    fn from_operator(basis: &SectorBasis, op: impl Fn(&FockVector) -> FockVector) -> Self {
        let d = basis.dim();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for col in 0..d {
            let image = basis.project(&op(&basis.state(col)));
            m.set_column(col, &image);
        }
        OperatorMatrix { matrix: m }
    }
}

/// `h_kl = (1/n) Σ_p ω(p) cos(p (z_k − z_l))`: the one-body kernel in mode units.
fn one_body_kernel(grid: &SpatialGrid, params: &ModelParams) -> Vec<f64> {
    let n = grid.n_points();
    let dz = grid.dz();
    (0..n)
        .map(|d| grid.momenta().iter().map(|&p| omega(params, p) * (p * d as f64 * dz).cos()).sum::<f64>() / n as f64)
        .collect()
}

/// `I₊(s)` at `s = d·dz`, by direct summation over the grid momenta.
fn i_plus_samples(grid: &SpatialGrid, params: &ModelParams) -> Vec<f64> {
    let n = grid.n_points();
    let dz = grid.dz();
    (0..n)
        .map(|d| {
            let s: f64 = grid
                .momenta()
                .iter()
                .map(|&p| params.c / (2.0 * omega(params, p)).sqrt() * (p * d as f64 * dz).cos())
                .sum();
            s * grid.dp() / (2.0 * PI)
        })
        .collect()
}

/// `Ĥ₀ = Σ_kl h_kl b_k† b_l` on the pair sector.
pub fn build_h0(basis: &SectorBasis, grid: &SpatialGrid, params: &ModelParams) -> OperatorMatrix {
    let n = basis.modes();
    let h = one_body_kernel(grid, params);
    OperatorMatrix::from_operator(basis, |v| {
        let mut out = FockVector::default();
        for l in 0..n as u16 {
            let lowered = v.annihilate(l);
            if lowered.terms.is_empty() {
                continue;
            }
            for k in 0..n as u16 {
                let d = (k as isize - l as isize).rem_euclid(n as isize) as usize;
                out.add_scaled(&lowered.create(k), Complex64::new(h[d], 0.0));
            }
        }
        out
    })
}

/// Number-conserving part of `λ ∫dξ :φ̂(ξ)⁴:`, namely `6λ ∫dξ Â†(ξ)² Â(ξ)²`
/// with `Â(ξ) = ∫dz I₊(ξ − z) â(z)`. Uses `params.lambda`.
pub fn build_v22(basis: &SectorBasis, grid: &SpatialGrid, params: &ModelParams) -> OperatorMatrix {
    let n = basis.modes();
    let dz = grid.dz();
    let d = basis.dim();
    let kern = i_plus_samples(grid, params);
    // u_ξ[s] = ⟨0| Â(ξ)² |s⟩
    let mut u = DMatrix::from_element(n, d, ZERO);
    for xi in 0..n {
        let alpha: Vec<f64> = (0..n).map(|i| dz.sqrt() * kern[(xi + n - i) % n]).collect();
        for s in 0..d {
            let once = basis.state(s).annihilate_combination(&alpha);
            u[(xi, s)] = once.annihilate_combination(&alpha).coefficient(&[]);
        }
    }
    // ⟨r| Â†² |0⟩⟨0| Â² |s⟩ summed over ξ with weight dz
    let m = u.adjoint() * &u * Complex64::new(6.0 * params.lambda * dz, 0.0);
    OperatorMatrix { matrix: m }
}

/// Time-expansion coefficients of `ρ(z, t) = ⟨ψ(t)| n̂(z) |ψ(t)⟩` at `t = 0`.
#[derive(Clone, Debug)]
pub struct OracleCoefficients {
    pub r0: RealField,
    pub r1_free: RealField,
    /// Per unit coupling.
    pub r1_int: RealField,
    pub r2_free: RealField,
    /// The part of the quadratic coefficient linear in the coupling, per unit coupling.
    pub r2_int: RealField,
    /// Coefficients for the full Hamiltonian at `params.lambda`.
    pub r1_total: RealField,
    pub r2_total: RealField,
}

struct Oracle {
    basis: SectorBasis,
    h0: DMatrix<Complex64>,
    v: DMatrix<Complex64>,
    psi: DVector<Complex64>,
}

impl Oracle {
    fn build(cfg: &TwoParticleConfig) -> Result<Self> {
        let grid = cfg.grid();
        let basis = SectorBasis::new(grid)?;
        let mut unit = *cfg.params();
        unit.lambda = 1.0;
        let h0 = build_h0(&basis, grid, cfg.params()).matrix;
        let v = build_v22(&basis, grid, &unit).matrix;
        let n = grid.n_points();
        let (gx, gy) = cfg.packets();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut phi = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                phi[i * n + j] = (gx.values()[i] * gy.values()[j] + gy.values()[i] * gx.values()[j]) * s;
            }
        }
        let mut psi = basis.from_wavefunction(&phi);
        let norm = psi.norm();
        psi /= Complex64::new(norm, 0.0);
        // A constant shift of Ĥ₀ leaves every density unchanged and improves cancellation.
        let e = (psi.adjoint() * &h0 * &psi)[(0, 0)].re;
        let mut h0 = h0;
        for k in 0..basis.dim() {
            h0[(k, k)] -= e;
        }
        Ok(Oracle { basis, h0, v, psi })
    }

    fn field(&self, grid: &std::sync::Arc<SpatialGrid>, v: Vec<f64>) -> Result<RealField> {
        RealField::new(grid.clone(), v)
    }

    fn hamiltonian(&self, lambda: f64) -> DMatrix<Complex64> {
        &self.h0 + &self.v * Complex64::new(lambda, 0.0)
    }

    // (r1, r2) for a given Hamiltonian
    fn coefficients(&self, h: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>) {
        let hp = h * &self.psi;
        let hhp = h * &hp;
        let a = self.basis.density_form(&self.psi, &hp);
        let b = self.basis.density_form(&hp, &hp);
        let c = self.basis.density_form(&self.psi, &hhp);
        let r1 = a.iter().map(|v| 2.0 * v.im).collect();
        let r2 = b.iter().zip(&c).map(|(b, c)| b.re - c.re).collect();
        (r1, r2)
    }
}

/// Exact expansion coefficients by dense matrix products. The part linear in
/// the coupling is isolated by evaluating at `±λ_probe` and differencing,
/// which is exact for the quadratic dependence of the coefficient on `λ`.
pub fn oracle_coefficients(cfg: &TwoParticleConfig) -> Result<OracleCoefficients> {
    let o = Oracle::build(cfg)?;
    let grid = cfg.grid();
    let r0: Vec<f64> = o.basis.density_form(&o.psi, &o.psi).iter().map(|v| v.re).collect();
    let (r1_free, r2_free) = o.coefficients(&o.h0);
    let hp = (&o.h0 * &o.psi).norm();
    let vp = (&o.v * &o.psi).norm();
    let probe = if vp > 0.0 { hp / vp } else { 1.0 };
    let (r1p, r2p) = o.coefficients(&o.hamiltonian(probe));
    let (r1m, r2m) = o.coefficients(&o.hamiltonian(-probe));
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * probe)).collect::<Vec<_>>();
    let (r1_total, r2_total) = o.coefficients(&o.hamiltonian(cfg.params().lambda));
    Ok(OracleCoefficients {
        r0: o.field(grid, r0)?,
        r1_int: o.field(grid, diff(&r1p, &r1m))?,
        r2_int: o.field(grid, diff(&r2p, &r2m))?,
        r1_free: o.field(grid, r1_free)?,
        r2_free: o.field(grid, r2_free)?,
        r1_total: o.field(grid, r1_total)?,
        r2_total: o.field(grid, r2_total)?,
    })
}

#[derive(Clone, Debug)]
pub struct PropagationSample {
    pub t: f64,
    /// `⟨ψ(t)| n̂ |ψ(t)⟩` from exact propagation.
    pub exact: RealField,
    /// `r0 + r1 t + r2 t²` with the full-coupling coefficients.
    pub truncated: RealField,
    /// L2 norm of `exact − truncated`.
    pub error: f64,
    /// `|‖ψ(t)‖ − 1|`.
    pub norm_drift: f64,
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub coefficients: OracleCoefficients,
    pub samples: Vec<PropagationSample>,
}

/// `e^{−iHt} ψ` by a scaled Taylor series.
fn propagate(h: &DMatrix<Complex64>, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    // Row-sum bound on ‖H‖.
    let bound = (0..h.nrows()).map(|i| h.row(i).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = ((bound * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut v = psi.clone();
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..60 {
            term = (h * &term) * Complex64::new(0.0, -dt / k as f64);
            acc += &term;
            if term.norm() < 1e-17 * acc.norm() {
                break;
            }
        }
        v = acc;
    }
    v
}

/// Coefficients plus exact propagation at each time in `times`.
pub fn oracle_short_time(cfg: &TwoParticleConfig, times: &[f64]) -> Result<OracleReport> {
    let coefficients = oracle_coefficients(cfg)?;
    let o = Oracle::build(cfg)?;
    let h = o.hamiltonian(cfg.params().lambda);
    let grid = cfg.grid();
    let dz = grid.dz();
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let psi_t = propagate(&h, &o.psi, t);
        let exact: Vec<f64> = o.basis.density_form(&psi_t, &psi_t).iter().map(|v| v.re).collect();
        let truncated: Vec<f64> = (0..grid.n_points())
            .map(|k| {
                coefficients.r0.values()[k]
                    + coefficients.r1_total.values()[k] * t
                    + coefficients.r2_total.values()[k] * t * t
            })
            .collect();
        let error = (exact.iter().zip(&truncated).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * dz).sqrt();
        samples.push(PropagationSample {
            t,
            exact: RealField::new(grid.clone(), exact)?,
            truncated: RealField::new(grid.clone(), truncated)?,
            error,
            norm_drift: (psi_t.norm() - 1.0).abs(),
        });
    }
    Ok(OracleReport { coefficients, samples })
}

/// Least-squares slope of `log(error)` against `log(t)`.
pub fn convergence_order(samples: &[PropagationSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t.abs().ln(), s.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use std::sync::Arc;

    fn coarse(n: usize) -> Arc<SpatialGrid> {
        SpatialGrid::new(n, -0.048, 0.048).unwrap()
    }

    #[test]
    fn canonical_commutator() {
        let v = FockVector::vacuum();
        for i in 0..4u16 {
            for j in 0..4u16 {
                for base in [v.clone(), v.create(2), v.create(1).create(1)] {
                    let mut c = base.create(j).annihilate(i);
                    c.add_scaled(&base.annihilate(i).create(j), Complex64::new(-1.0, 0.0));
                    let expect = if i == j { 1.0 } else { 0.0 };
                    for (k, coef) in c.iter() {
                        assert!((coef - base.coefficient(k) * expect).norm() < 1e-14);
                    }
                    if i == j {
                        for (k, coef) in base.iter() {
                            assert!((c.coefficient(k) - coef).norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_size_and_guard() {
        let b = SectorBasis::new(&coarse(48)).unwrap();
        assert_eq!(b.dim(), 1176);
        assert!(matches!(SectorBasis::new(&coarse(64)), Err(Error::BasisTooLarge(64))));
    }

    #[test]
    fn symmetric_state_normalization() {
        let g = coarse(12);
        let b = SectorBasis::new(&g).unwrap();
        let n = 12;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin() + 0.2).collect();
        let k: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut phi = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                phi[i * n + j] = Complex64::new(f[i] * k[j] + k[i] * f[j], 0.0);
            }
        }
        let v = b.from_wavefunction(&phi);
        let cont: f64 = phi.iter().map(|x| x.norm_sqr()).sum::<f64>() * g.dz() * g.dz();
        assert!((v.norm_squared() - cont).abs() < 1e-12 * cont);
        // density integrates to twice the norm
        let d: f64 = b.density_form(&v, &v).iter().map(|x| x.re).sum::<f64>() * g.dz();
        assert!((d - 2.0 * cont).abs() < 1e-12 * cont);
    }

    #[test]
    fn h0_plane_wave_eigenvalues() {
        let g = coarse(16);
        let pr = ModelParams::default();
        let b = SectorBasis::new(&g).unwrap();
        let h = build_h0(&b, &g, &pr);
        assert!(h.is_hermitian());
        let n = 16;
        let (p1, p2) = (g.momenta()[3], g.momenta()[13]);
        let z = g.positions();
        let mut phi = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                phi[i * n + j] = Complex64::from_polar(1.0, p1 * z[i] + p2 * z[j]) + Complex64::from_polar(1.0, p2 * z[i] + p1 * z[j]);
            }
        }
        let v = b.from_wavefunction(&phi);
        let e = omega(&pr, p1) + omega(&pr, p2);
        let r = &h.matrix * &v - &v * Complex64::new(e, 0.0);
        assert!(r.norm() < 1e-8 * e * v.norm());
    }

    #[test]
    fn ground_state_above_two_rest_energies() {
        let g = coarse(24);
        let pr = ModelParams::default();
        let b = SectorBasis::new(&g).unwrap();
        let h = build_h0(&b, &g, &pr);
        let eig = SymmetricEigen::new(h.matrix.clone());
        let lowest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lowest >= 2.0 * pr.rest_energy() * (1.0 - 1e-12));
        assert!((lowest - 2.0 * pr.rest_energy()).abs() < 1e-6 * pr.rest_energy());
    }

    #[test]
    fn v22_properties() {
        let g = coarse(16);
        let mut pr = ModelParams::default();
        let b = SectorBasis::new(&g).unwrap();
        let v = build_v22(&b, &g, &pr);
        assert!(v.is_hermitian());
        let scale = v.matrix.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(scale > 0.0);
        let n = 16u16;
        let sh = |i: u16, s: u16| (i + s) % n;
        for &(i, j) in b.pairs().iter().step_by(7) {
            for &(k, l) in b.pairs().iter().step_by(5) {
                let a = v.matrix[(b.index_of(i, j).unwrap(), b.index_of(k, l).unwrap())];
                for s in [1u16, 5, 11] {
                    let r = b.index_of(sh(i, s), sh(j, s)).unwrap();
                    let c = b.index_of(sh(k, s), sh(l, s)).unwrap();
                    assert!((v.matrix[(r, c)] - a).norm() < 1e-10 * scale);
                }
            }
        }
        pr.lambda = 0.0;
        assert!(build_v22(&b, &g, &pr).matrix.iter().all(|x| *x == ZERO));
    }

    #[test]
    fn linear_terms_vanish_for_real_packets() {
        let g = coarse(32);
        let cfg = TwoParticleConfig::new(0.005, -0.02, 0.02, ModelParams::default(), g).unwrap();
        let c = oracle_coefficients(&cfg).unwrap();
        let scale = c.r2_free.values().iter().chain(c.r2_int.values()).fold(0.0f64, |m, v| m.max(v.abs()));
        for v in c.r1_free.values().iter().chain(c.r1_int.values()) {
            assert!(v.abs() < 1e-10 * scale);
        }
        assert!((c.r0.integral() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn free_coefficient_matches_spectral_path() {
        let g = coarse(32);
        let cfg = TwoParticleConfig::new(0.005, -0.02, 0.02, ModelParams::default(), g).unwrap();
        let c = oracle_coefficients(&cfg).unwrap();
        let fd = crate::interaction::r_free_quadratic(&cfg).unwrap();
        assert!(fd.rel_l2_diff(&c.r2_free) < 0.02);
    }

    #[test]
    fn interaction_coefficient_matches_spectral_path() {
        let g = coarse(32);
        let cfg = TwoParticleConfig::new(0.005, -0.02, 0.02, ModelParams::default(), g).unwrap();
        let c = oracle_coefficients(&cfg).unwrap();
        let r = crate::interaction::r_int_unguarded(&cfg).unwrap();
        assert!(r.rel_l2_diff(&c.r2_int) < 1e-6, "{}", r.rel_l2_diff(&c.r2_int));
    }

    #[test]
    fn propagation_is_unitary_and_third_order() {
        let g = coarse(24);
        let cfg = TwoParticleConfig::with_kick(0.005, -0.02, 0.02, 400.0, ModelParams::default(), g).unwrap();
        let times: Vec<f64> = (0..5).map(|k| 1e-7 * 10f64.powf(k as f64 / 4.0)).collect();
        let rep = oracle_short_time(&cfg, &times).unwrap();
        for s in &rep.samples {
            assert!(s.norm_drift < 1e-10);
        }
        let order = convergence_order(&rep.samples);
        assert!((order - 3.0).abs() < 0.2, "{order}");
    }
}
